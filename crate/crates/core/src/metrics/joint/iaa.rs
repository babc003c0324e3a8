use crate::error::{Error, Result};
use crate::examination::ExamSpec;
use crate::metrics::joint::{JointConfig, Scratch, UserScores};
use crate::metrics::EvalContext;

/// Inequity of amortized attention (lower is fairer).
///
/// Per user, `1/n * sum_i |mean_w e~(z) - r~(u,i)|` where `e~` is the
/// min-max normalized linear examination of top-k items and `r~` the
/// user's grade min-max normalized over the whole item universe. A user
/// whose grades are all equal gets `r~ = 0`.
pub fn iaa(ctx: &EvalContext, _cfg: &JointConfig) -> Result<UserScores> {
    let k = ctx.k();
    if k < 2 {
        return Err(Error::DegenerateCutoff(k));
    }
    let n = ctx.num_items();
    let rounds = ctx.rounds() as f64;
    let mut exposure = Scratch::new(n);
    let mut per_user = Vec::with_capacity(ctx.num_users());
    for u in 0..ctx.num_users() {
        let relevant = ctx.relevant(u);
        let max = relevant.iter().map(|e| e.1).fold(0.0, f64::max);
        let min = if relevant.len() < n {
            0.0
        } else {
            relevant.iter().map(|e| e.1).fold(f64::INFINITY, f64::min)
        };
        let norm = |g: f64| if max > min { (g - min) / (max - min) } else { 0.0 };

        for w in 0..ctx.rounds() {
            for (pos, &i) in ctx.top(u, w).iter().enumerate() {
                let e = ExamSpec::NormalizedLinear.weight_unchecked(pos + 1, k);
                exposure.add(i, e / rounds);
            }
        }
        let mut sum = 0.0;
        for &(i, g) in relevant {
            sum += (exposure.get(i) - norm(g)).abs();
        }
        for &i in exposure.touched() {
            if relevant.binary_search_by_key(&i, |e| e.0).is_err() {
                // unjudged item: grade 0
                sum += (exposure.get(i) - norm(0.0)).abs();
            }
        }
        exposure.clear();
        per_user.push(sum / n as f64);
    }
    Ok(UserScores::mean_of(per_user))
}
