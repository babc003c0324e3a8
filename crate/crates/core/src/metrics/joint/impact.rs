use serde::Serialize;

use crate::error::{Error, Result};
use crate::examination::harmonic;
use crate::metrics::joint::{ItemScores, JointConfig, Scratch};
use crate::metrics::EvalContext;

/// Factored impact scores.
///
/// `Imp_i(i') = sum_u r(u,i) * x(u,i')` where `x(u,i')` is the expected
/// inverse-rank exposure of `i'` to `u`, `1/(W m) sum_w [z <= k] / z`. Only
/// the sparse per-user exposures and the item-to-user relevance index are
/// stored, so a full row costs `O(|users(i)| * k * W)`.
#[derive(Debug, Clone)]
pub struct ImpactTable {
    n: usize,
    m: usize,
    k: usize,
    /// Per user, `(item, x(u,item))` over the items the user was shown.
    exposure: Vec<Vec<(u32, f64)>>,
    /// Per item, `(user, grade)` with positive grade.
    relevant_users: Vec<Vec<(u32, f64)>>,
}

impl ImpactTable {
    pub fn new(ctx: &EvalContext) -> Self {
        let (n, m, k) = (ctx.num_items(), ctx.num_users(), ctx.k());
        let scale = 1.0 / (ctx.rounds() * m) as f64;
        let mut scratch = Scratch::new(n);
        let mut exposure = Vec::with_capacity(m);
        let mut relevant_users: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for u in 0..m {
            for w in 0..ctx.rounds() {
                for (pos, &i) in ctx.top(u, w).iter().enumerate() {
                    scratch.add(i, scale / (pos + 1) as f64);
                }
            }
            let mut row: Vec<(u32, f64)> = scratch.touched().iter().map(|&i| (i, scratch.get(i))).collect();
            row.sort_unstable_by_key(|e| e.0);
            scratch.clear();
            exposure.push(row);
            for &(i, g) in ctx.relevant(u) {
                relevant_users[i as usize].push((u as u32, g));
            }
        }
        Self {
            n,
            m,
            k,
            exposure,
            relevant_users,
        }
    }

    pub fn num_items(&self) -> usize {
        self.n
    }

    /// Items with at least one relevant user.
    pub fn eligible_items(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n as u32).filter(|&i| !self.relevant_users[i as usize].is_empty())
    }

    /// `Imp_i(i')`: impact on `i` of receiving the exposure of `other`.
    pub fn impact(&self, i: u32, other: u32) -> f64 {
        self.relevant_users[i as usize]
            .iter()
            .map(|&(u, g)| {
                let row = &self.exposure[u as usize];
                g * row.binary_search_by_key(&other, |e| e.0).map_or(0.0, |j| row[j].1)
            })
            .sum()
    }

    /// Impact of `i` under the uniform random ranking policy,
    /// `H_k / (m n) * sum_u r(u,i)`.
    pub fn uniform_impact(&self, i: u32) -> f64 {
        let total: f64 = self.relevant_users[i as usize].iter().map(|e| e.1).sum();
        harmonic(self.k) / (self.m as f64 * self.n as f64) * total
    }

    /// `(max_{i'} Imp_i(i'), Imp_i(i))`, reusing `scratch` for the row.
    fn row_max_and_own(&self, i: u32, scratch: &mut Scratch) -> (f64, f64) {
        for &(u, g) in &self.relevant_users[i as usize] {
            for &(other, x) in &self.exposure[u as usize] {
                scratch.add(other, g * x);
            }
        }
        // untouched entries are exactly 0 and all entries are >= 0
        let max = scratch.touched().iter().map(|&o| scratch.get(o)).fold(0.0, f64::max);
        let own = scratch.get(i);
        scratch.clear();
        (max, own)
    }
}

/// Mean max envy: `1/n sum_i (max_{i'} Imp_i(i') - Imp_i(i))`.
pub fn mme(ctx: &EvalContext, _cfg: &JointConfig) -> Result<ItemScores> {
    let table = ImpactTable::new(ctx);
    Ok(mme_from_table(&table))
}

pub(crate) fn mme_from_table(table: &ImpactTable) -> ItemScores {
    let mut scratch = Scratch::new(table.n);
    let mut per_item = vec![0.0; table.n];
    for i in table.eligible_items() {
        let (max, own) = table.row_max_and_own(i, &mut scratch);
        per_item[i as usize] = max - own;
    }
    ItemScores::mean_of(per_item)
}

/// Items better and worse off than under uniform random ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dominance {
    /// Fraction of eligible items with `Imp_i(i) >= (1 + t) Imp_unif(i)`.
    pub ibo: f64,
    /// Fraction of eligible items with `Imp_i(i) <= (1 - t) Imp_unif(i)`.
    pub iwo: f64,
    pub better_off: Vec<u32>,
    pub worse_off: Vec<u32>,
    /// Number of items with at least one relevant user.
    pub eligible: usize,
}

pub fn ibo_iwo(ctx: &EvalContext, cfg: &JointConfig) -> Result<Dominance> {
    let table = ImpactTable::new(ctx);
    dominance_from_table(&table, cfg.impact_threshold)
}

pub(crate) fn dominance_from_table(table: &ImpactTable, threshold: f64) -> Result<Dominance> {
    let mut better_off = Vec::new();
    let mut worse_off = Vec::new();
    let mut eligible = 0usize;
    for i in table.eligible_items() {
        eligible += 1;
        let own = table.impact(i, i);
        let unif = table.uniform_impact(i);
        if own >= (1.0 + threshold) * unif {
            better_off.push(i);
        } else if own <= (1.0 - threshold) * unif {
            worse_off.push(i);
        }
    }
    if eligible == 0 {
        return Err(Error::UndefinedInput("no item is relevant to any user".into()));
    }
    Ok(Dominance {
        ibo: better_off.len() as f64 / eligible as f64,
        iwo: worse_off.len() as f64 / eligible as f64,
        better_off,
        worse_off,
        eligible,
    })
}
