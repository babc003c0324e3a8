//! Literal-definition reference implementations of all twenty measures.
//!
//! Everything here enumerates the defining sums and pairs directly, on a
//! dense toy representation, without any of the library's shortcuts.
#![allow(dead_code)]

use fairrel::corpus::{RankedList, RelevanceTable, RunData};
use fairrel::ids::Interner;
use fairrel::metrics::Measure;
use rand::seq::SliceRandom;
use rand::Rng;

/// Dense toy instance: every list ranks the whole catalog.
#[derive(Debug, Clone)]
pub struct Toy {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rounds: usize,
    /// `lists[u][w]`: item indices, best first, all `n` of them.
    pub lists: Vec<Vec<Vec<usize>>>,
    /// `grades[u][i]`.
    pub grades: Vec<Vec<f64>>,
}

pub const GAMMA_HD: f64 = 0.9;
pub const GAMMA_IIF: f64 = 0.8;
pub const TAU: f64 = 0.10;

impl Toy {
    pub fn random<R: Rng>(rng: &mut R, max_m: usize, max_n: usize, max_k: usize, max_w: usize) -> Toy {
        loop {
            let k = rng.random_range(1..=max_k);
            let n = rng.random_range(k.max(2)..=max_n.max(k.max(2)));
            let m = rng.random_range(1..=max_m);
            let rounds = rng.random_range(1..=max_w);
            let lists = (0..m)
                .map(|_| {
                    (0..rounds)
                        .map(|_| {
                            let mut l: Vec<usize> = (0..n).collect();
                            l.shuffle(rng);
                            l
                        })
                        .collect()
                })
                .collect();
            let levels = [0.0, 0.0, 0.0, 0.25, 0.5, 1.0];
            let grades: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| levels[rng.random_range(0..levels.len())]).collect())
                .collect();
            if grades.iter().flatten().any(|&g| g > 0.0) {
                return Toy { m, n, k, rounds, lists, grades };
            }
        }
    }

    pub fn user(u: usize) -> String {
        format!("u{u:02}")
    }

    pub fn item(i: usize) -> String {
        format!("i{i:02}")
    }

    pub fn run(&self) -> RunData {
        let lists = self
            .lists
            .iter()
            .map(|per_round| {
                per_round
                    .iter()
                    .map(|l| RankedList::new(l.iter().map(|&i| i as u32).collect()))
                    .collect()
            })
            .collect();
        RunData::new(
            Interner::from_names((0..self.m).map(Toy::user)),
            Interner::from_names((0..self.n).map(Toy::item)),
            lists,
        )
        .unwrap()
    }

    pub fn qrels(&self) -> RelevanceTable {
        let mut rel = RelevanceTable::new();
        for u in 0..self.m {
            rel.declare_user(Toy::user(u));
        }
        for i in 0..self.n {
            rel.declare_item(Toy::item(i));
        }
        for u in 0..self.m {
            for i in 0..self.n {
                if self.grades[u][i] > 0.0 {
                    rel.set(Toy::user(u), Toy::item(i), self.grades[u][i]).unwrap();
                }
            }
        }
        rel
    }

    /// 1-based position of `i` in list `(u, w)`.
    fn pos(&self, u: usize, w: usize, i: usize) -> usize {
        self.lists[u][w].iter().position(|&x| x == i).unwrap() + 1
    }

    fn in_top(&self, u: usize, w: usize, i: usize) -> bool {
        self.pos(u, w, i) <= self.k
    }

    fn num_relevant(&self, u: usize) -> usize {
        self.grades[u].iter().filter(|&&g| g > 0.0).count()
    }

    /// Oracle value of `measure`; `None` where the measure is undefined.
    pub fn oracle(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Hr | Measure::Mrr | Measure::Precision | Measure::Recall | Measure::Map | Measure::Ndcg => {
                Some(self.rel(measure))
            }
            Measure::Jain => Some(self.jain()),
            Measure::Qf => Some(self.qf()),
            Measure::Entropy => Some(self.entropy()),
            Measure::Fsat => Some(self.fsat()),
            Measure::Gini => Some(self.gini()),
            Measure::Ibo => self.dominance().map(|d| d.0),
            Measure::Iwo => self.dominance().map(|d| d.1),
            Measure::Iaa => self.iaa(),
            Measure::IfdDiv => Some(self.ifd_div()),
            Measure::IfdMul => Some(self.ifd_mul()),
            Measure::Hd => Some(self.hd()),
            Measure::Mme => Some(self.mme()),
            Measure::IiF => Some(self.iif()),
            Measure::AiF => Some(self.aif()),
        }
    }

    // ---- relevance ----

    fn rel(&self, measure: Measure) -> f64 {
        let mut total = 0.0;
        let mut users = 0;
        for u in 0..self.m {
            let r = self.num_relevant(u);
            if r == 0 {
                continue;
            }
            users += 1;
            let mut per_user = 0.0;
            for w in 0..self.rounds {
                let rel_at = |z: usize| self.grades[u][self.lists[u][w][z - 1]] > 0.0;
                let hits = (1..=self.k).filter(|&z| rel_at(z)).count();
                per_user += match measure {
                    Measure::Hr => (hits > 0) as u8 as f64,
                    Measure::Mrr => (1..=self.k).find(|&z| rel_at(z)).map_or(0.0, |z| 1.0 / z as f64),
                    Measure::Precision => hits as f64 / self.k as f64,
                    Measure::Recall => hits as f64 / r as f64,
                    Measure::Map => {
                        let mut s = 0.0;
                        for z in 1..=self.k {
                            if rel_at(z) {
                                let upto = (1..=z).filter(|&y| rel_at(y)).count();
                                s += upto as f64 / z as f64;
                            }
                        }
                        s / r.min(self.k) as f64
                    }
                    Measure::Ndcg => {
                        let dcg: f64 = (1..=self.k).filter(|&z| rel_at(z)).map(|z| 1.0 / (z as f64 + 1.0).log2()).sum();
                        let ideal: f64 = (1..=r.min(self.k)).map(|z| 1.0 / (z as f64 + 1.0).log2()).sum();
                        dcg / ideal
                    }
                    _ => unreachable!(),
                };
            }
            total += per_user / self.rounds as f64;
        }
        if users == 0 {
            0.0
        } else {
            total / users as f64
        }
    }

    // ---- fairness ----

    fn counts(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let mut c = 0.0;
                for u in 0..self.m {
                    for w in 0..self.rounds {
                        if self.in_top(u, w, i) {
                            c += 1.0;
                        }
                    }
                }
                c
            })
            .collect()
    }

    fn jain(&self) -> f64 {
        let x = self.counts();
        let s: f64 = x.iter().sum();
        let s2: f64 = x.iter().map(|v| v * v).sum();
        s * s / (self.n as f64 * s2)
    }

    fn qf(&self) -> f64 {
        self.counts().iter().filter(|&&c| c > 0.0).count() as f64 / self.n as f64
    }

    fn entropy(&self) -> f64 {
        if self.n == 1 {
            return 1.0;
        }
        let x = self.counts();
        let s: f64 = x.iter().sum();
        let h: f64 = x
            .iter()
            .map(|&c| {
                let p = c / s;
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            })
            .sum();
        h / (self.n as f64).ln()
    }

    fn fsat(&self) -> f64 {
        let x = self.counts();
        let total = (self.k * self.m * self.rounds) as f64;
        let share = (total / self.n as f64).floor().max(1.0);
        x.iter().filter(|&&c| c >= share).count() as f64 / self.n as f64
    }

    fn gini(&self) -> f64 {
        let mut x = self.counts();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = self.n as f64;
        let s: f64 = x.iter().sum();
        let mut num = 0.0;
        for (idx, v) in x.iter().enumerate() {
            let i = (idx + 1) as f64;
            num += (2.0 * i - n - 1.0) * v;
        }
        num / (n * s)
    }

    // ---- joint ----

    fn iaa(&self) -> Option<f64> {
        if self.k < 2 {
            return None;
        }
        let e_li = |z: usize| (self.k - z) as f64 / (self.k - 1) as f64;
        let mut total = 0.0;
        for u in 0..self.m {
            let max = self.grades[u].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = self.grades[u].iter().cloned().fold(f64::INFINITY, f64::min);
            let r_tilde = |i: usize| {
                if max == min {
                    0.0
                } else {
                    (self.grades[u][i] - min) / (max - min)
                }
            };
            let mut s = 0.0;
            for i in 0..self.n {
                let mut inner = 0.0;
                for w in 0..self.rounds {
                    let z = self.pos(u, w, i);
                    let e = if z <= self.k { e_li(z) } else { 0.0 };
                    inner += e - r_tilde(i);
                }
                s += inner.abs();
            }
            total += s / (self.n as f64 * self.rounds as f64);
        }
        Some(total / self.m as f64)
    }

    fn e_dcg(z: usize) -> f64 {
        1.0 / (z as f64 + 1.0).log2()
    }

    fn ifd_div(&self) -> f64 {
        let mut total = 0.0;
        for u in 0..self.m {
            let g = &self.grades[u];
            let j = |i: usize| {
                (0..self.rounds).map(|w| Toy::e_dcg(self.pos(u, w, i)) / g[i]).sum::<f64>() / self.rounds as f64
            };
            let mut pairs = 0usize;
            let mut s = 0.0;
            for a in 0..self.n {
                for b in 0..self.n {
                    if g[a] >= g[b] && g[b] > 0.0 {
                        pairs += 1;
                        s += (j(a) - j(b)).max(0.0);
                    }
                }
            }
            if pairs > 0 {
                total += s / pairs as f64;
            }
        }
        total / self.m as f64
    }

    fn ifd_mul(&self) -> f64 {
        let mut total = 0.0;
        for u in 0..self.m {
            let j = |i: usize| {
                (0..self.rounds)
                    .map(|w| {
                        let z = self.pos(u, w, i);
                        let top = if z <= self.k { 1.0 } else { 0.0 };
                        self.grades[u][i] * top * Toy::e_dcg(z)
                    })
                    .sum::<f64>()
                    / self.rounds as f64
            };
            let mut s = 0.0;
            for a in 0..self.n {
                for b in 0..self.n {
                    if a != b {
                        s += (j(a) - j(b)).powi(2);
                    }
                }
            }
            total += s / (self.n * (self.n - 1)) as f64;
        }
        total / self.m as f64
    }

    fn hd(&self) -> f64 {
        let k = self.k;
        let mut q = vec![0.0; k + 1];
        let mut c = vec![0.0; k + 1];
        let mut lists = 0usize;
        for u in 0..self.m {
            let g = &self.grades[u];
            // reference list: all items by grade desc, ties by item index
            let mut reference: Vec<usize> = (0..self.n).collect();
            reference.sort_by(|&a, &b| g[b].partial_cmp(&g[a]).unwrap().then(a.cmp(&b)));
            let z_star = |i: usize| reference.iter().position(|&x| x == i).unwrap() + 1;
            let sum_r: f64 = g.iter().sum();
            for p in 1..=k {
                for i in 0..self.n {
                    if z_star(i) == p && sum_r > 0.0 {
                        q[p] += g[i] / sum_r;
                    }
                }
            }
            for w in 0..self.rounds {
                let at = |p: usize| self.lists[u][w][p - 1];
                let mut c_up = vec![0.0; k + 1];
                for p in 1..=k {
                    let mut s = 1.0;
                    for j in 1..p {
                        s *= 1.0 - g[at(j)];
                    }
                    c_up[p] = g[at(p)] * GAMMA_HD * GAMMA_HD.powi(p as i32 - 1) * s;
                }
                let c_sum: f64 = c_up.iter().sum();
                if c_sum == 0.0 {
                    continue;
                }
                let c_full = |i: usize| {
                    let z = self.pos(u, w, i);
                    if z <= k {
                        c_up[z] / c_sum
                    } else {
                        0.0
                    }
                };
                let mut c_star = vec![0.0; k + 1];
                for p in 1..=k {
                    for i in 0..self.n {
                        if z_star(i) == p {
                            c_star[p] += c_full(i);
                        }
                    }
                }
                let star_sum: f64 = c_star.iter().sum();
                if star_sum == 0.0 {
                    continue;
                }
                for p in 1..=k {
                    c[p] += c_star[p] / star_sum;
                }
                lists += 1;
            }
        }
        let mut h = 0.0;
        for p in 1..=k {
            let qp = q[p] / self.m as f64;
            let cp = if lists > 0 { c[p] / lists as f64 } else { 0.0 };
            h += (qp.sqrt() - cp.sqrt()).powi(2);
        }
        h.sqrt() / 2f64.sqrt()
    }

    /// Imp_i(i') by the defining double sum over users and positions.
    fn imp(&self, i: usize, other: usize) -> f64 {
        let mut s = 0.0;
        for u in 0..self.m {
            for p in 1..=self.k {
                let mut x = 0.0;
                for w in 0..self.rounds {
                    if self.in_top(u, w, other) && self.pos(u, w, other) == p {
                        x += 1.0;
                    }
                }
                x /= (self.rounds * self.m) as f64;
                s += self.grades[u][i] * (1.0 / p as f64) * x;
            }
        }
        s
    }

    fn mme(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            let best = (0..self.n).map(|o| self.imp(i, o)).fold(f64::NEG_INFINITY, f64::max);
            total += best - self.imp(i, i);
        }
        total / self.n as f64
    }

    fn imp_unif(&self, i: usize) -> f64 {
        let h: f64 = (1..=self.k).map(|p| 1.0 / p as f64).sum();
        let r: f64 = (0..self.m).map(|u| self.grades[u][i]).sum();
        h * r / (self.m * self.n) as f64
    }

    /// (ibo, iwo, better-off set, worse-off set) over items with a relevant user.
    pub fn dominance_sets(&self) -> Option<(f64, f64, Vec<usize>, Vec<usize>)> {
        let eligible: Vec<usize> = (0..self.n)
            .filter(|&i| (0..self.m).any(|u| self.grades[u][i] > 0.0))
            .collect();
        if eligible.is_empty() {
            return None;
        }
        let better: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&i| self.imp(i, i) >= (1.0 + TAU) * self.imp_unif(i))
            .collect();
        let worse: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&i| self.imp(i, i) <= (1.0 - TAU) * self.imp_unif(i))
            .collect();
        let d = eligible.len() as f64;
        Some((better.len() as f64 / d, worse.len() as f64 / d, better, worse))
    }

    fn dominance(&self) -> Option<(f64, f64)> {
        self.dominance_sets().map(|d| (d.0, d.1))
    }

    fn e(&self, u: usize, i: usize) -> f64 {
        (0..self.rounds)
            .map(|w| {
                let z = self.pos(u, w, i);
                if z <= self.k {
                    GAMMA_IIF.powi(z as i32 - 1)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            / self.rounds as f64
    }

    fn e_star(&self, u: usize, i: usize) -> f64 {
        let r = self.num_relevant(u);
        if r == 0 {
            return 0.0;
        }
        self.grades[u][i] / r as f64 * (1.0 - GAMMA_IIF.powi(r as i32)) / (1.0 - GAMMA_IIF)
    }

    fn iif(&self) -> f64 {
        let mut s = 0.0;
        for u in 0..self.m {
            for i in 0..self.n {
                s += (self.e(u, i) - self.e_star(u, i)).powi(2);
            }
        }
        s / (self.m * self.n) as f64
    }

    fn aif(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let e: f64 = (0..self.m).map(|u| self.e(u, i)).sum::<f64>() / self.m as f64;
            let t: f64 = (0..self.m).map(|u| self.e_star(u, i)).sum::<f64>() / self.m as f64;
            s += (e - t).powi(2);
        }
        s / self.n as f64
    }
}

/// Tau-b from pairwise concordance counts.
pub fn kendall_pairwise(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    let (mut conc, mut disc, mut tie_a, mut tie_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 {
                tie_a += 1;
            }
            if db == 0.0 {
                tie_b += 1;
            }
            if da != 0.0 && db != 0.0 {
                if (da > 0.0) == (db > 0.0) {
                    conc += 1;
                } else {
                    disc += 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    if n0 == 0 || tie_a == n0 || tie_b == n0 {
        return None;
    }
    Some((conc - disc) as f64 / (((n0 - tie_a) * (n0 - tie_b)) as f64).sqrt())
}
