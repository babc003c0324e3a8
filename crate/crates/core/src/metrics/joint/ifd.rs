use crate::error::{Error, Result};
use crate::examination::dcg_discount;
use crate::metrics::joint::{JointConfig, UserScores};
use crate::metrics::EvalContext;

/// Individual fairness disparity, exposure divided by merit.
///
/// For relevant items, `J(i) = mean_w dcg(z(u,i,w)) / r(u,i)` with `z` the
/// rank in the full list. The user term averages `max(0, J(i) - J(i'))` over
/// ordered pairs with `r(i) >= r(i') > 0`, self-pairs included. Users
/// without relevant items score 0.
///
/// Needs the rank of every relevant item, so truncated runs fail with
/// [`Error::MissingRank`].
pub fn ifd_div(ctx: &EvalContext, _cfg: &JointConfig) -> Result<UserScores> {
    let rounds = ctx.rounds() as f64;
    let mut per_user = Vec::with_capacity(ctx.num_users());
    for u in 0..ctx.num_users() {
        let relevant = ctx.relevant(u);
        if relevant.is_empty() {
            per_user.push(0.0);
            continue;
        }
        let mut merit_exposure = vec![0.0; relevant.len()];
        for w in 0..ctx.rounds() {
            for (j, rank) in ctx.relevant_ranks(u, w).iter().enumerate() {
                let z = rank.ok_or_else(|| Error::MissingRank {
                    user: ctx.user_name(u).to_owned(),
                    item: ctx.judged_item_name(relevant[j].0).unwrap_or("?").to_owned(),
                })?;
                merit_exposure[j] += dcg_discount(z as usize) / relevant[j].1 / rounds;
            }
        }
        let grades: Vec<f64> = relevant.iter().map(|e| e.1).collect();
        let (sum, pairs) = dominated_gap_sum(&grades, &merit_exposure);
        per_user.push(sum / pairs as f64);
    }
    Ok(UserScores::mean_of(per_user))
}

/// Returns `sum over (a, b) with grade[a] >= grade[b] of max(0, j[a] - j[b])`
/// and the number of such ordered pairs, in `O(r log r)`.
fn dominated_gap_sum(grade: &[f64], j: &[f64]) -> (f64, usize) {
    let r = grade.len();
    // rank positions of J values for the Fenwick trees
    let mut by_j: Vec<usize> = (0..r).collect();
    by_j.sort_by(|&a, &b| j[a].total_cmp(&j[b]));
    let mut j_pos = vec![0usize; r];
    for (pos, &idx) in by_j.iter().enumerate() {
        j_pos[idx] = pos;
    }
    let mut by_grade: Vec<usize> = (0..r).collect();
    by_grade.sort_by(|&a, &b| grade[b].total_cmp(&grade[a]));

    let mut count = Fenwick::new(r);
    let mut mass = Fenwick::new(r);
    let mut inserted = 0usize;
    let mut total = 0.0;
    let mut pairs = 0usize;
    let mut start = 0;
    while start < r {
        let g = grade[by_grade[start]];
        let mut end = start;
        while end < r && grade[by_grade[end]] == g {
            end += 1;
        }
        // the whole tie group dominates itself
        for &idx in &by_grade[start..end] {
            count.add(j_pos[idx], 1.0);
            mass.add(j_pos[idx], j[idx]);
            inserted += 1;
        }
        for &idx in &by_grade[start..end] {
            // entries with J strictly greater than j[idx]
            let upto = upper_bound(&by_j, j, j[idx]);
            let c = inserted as f64 - count.prefix(upto);
            let s = mass.total() - mass.prefix(upto);
            total += s - c * j[idx];
            pairs += inserted;
        }
        start = end;
    }
    (total, pairs)
}

/// Number of sorted positions with `J <= v`.
fn upper_bound(by_j: &[usize], j: &[f64], v: f64) -> usize {
    by_j.partition_point(|&idx| j[idx] <= v)
}

struct Fenwick {
    tree: Vec<f64>,
    sum: f64,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0.0; n + 1],
            sum: 0.0,
        }
    }

    fn add(&mut self, pos: usize, v: f64) {
        self.sum += v;
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of the first `len` positions.
    fn prefix(&self, len: usize) -> f64 {
        let mut i = len;
        let mut acc = 0.0;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }

    fn total(&self) -> f64 {
        self.sum
    }
}

/// Individual fairness disparity, exposure multiplied by merit.
///
/// `J(i) = mean_w r(u,i) * [z <= k] * dcg(z)`; the user term is the mean
/// squared difference over ordered pairs of distinct items in the universe.
pub fn ifd_mul(ctx: &EvalContext, _cfg: &JointConfig) -> Result<UserScores> {
    let n = ctx.num_items();
    if n < 2 {
        return Err(Error::UndefinedInput("IFD needs at least two items".into()));
    }
    let rounds = ctx.rounds() as f64;
    let mut per_user = Vec::with_capacity(ctx.num_users());
    for u in 0..ctx.num_users() {
        let relevant = ctx.relevant(u);
        let mut values = vec![0.0; relevant.len()];
        for w in 0..ctx.rounds() {
            for (pos, &i) in ctx.top(u, w).iter().enumerate() {
                if let Ok(j) = relevant.binary_search_by_key(&i, |e| e.0) {
                    values[j] += relevant[j].1 * dcg_discount(pos + 1) / rounds;
                }
            }
        }
        // sum_{i != i'} (a_i - a_i')^2 = 2 n sum a^2 - 2 (sum a)^2
        let s1: f64 = values.iter().sum();
        let s2: f64 = values.iter().map(|v| v * v).sum();
        let nf = n as f64;
        let pair_sum = (2.0 * nf * s2 - 2.0 * s1 * s1).max(0.0);
        per_user.push(pair_sum / (nf * (nf - 1.0)));
    }
    Ok(UserScores::mean_of(per_user))
}
