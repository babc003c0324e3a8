use crate::error::Result;
use crate::metrics::joint::{ItemScores, JointConfig, Scratch, UserScores};
use crate::metrics::EvalContext;

/// Target exposure of an item with grade `grade` for a user with
/// `num_relevant` relevant items under RBP patience `gamma`:
/// `grade / R * (1 - gamma^R) / (1 - gamma)`, or 0 when `R = 0`.
pub fn target_exposure(grade: f64, num_relevant: usize, gamma: f64) -> f64 {
    if num_relevant == 0 {
        return 0.0;
    }
    let r = num_relevant as f64;
    grade / r * (1.0 - gamma.powi(num_relevant as i32)) / (1.0 - gamma)
}

/// Calls `f(item, system_exposure, target_exposure)` for every item of the
/// user's support (shown or relevant); all other items have both at 0.
fn for_each_exposure(ctx: &EvalContext, u: usize, gamma: f64, scratch: &mut Scratch, mut f: impl FnMut(u32, f64, f64)) {
    let rounds = ctx.rounds() as f64;
    for w in 0..ctx.rounds() {
        let mut weight = 1.0;
        for &i in ctx.top(u, w) {
            scratch.add(i, weight / rounds);
            weight *= gamma;
        }
    }
    let relevant = ctx.relevant(u);
    for &(i, g) in relevant {
        f(i, scratch.get(i), target_exposure(g, relevant.len(), gamma));
    }
    for &i in scratch.touched() {
        if relevant.binary_search_by_key(&i, |e| e.0).is_err() {
            f(i, scratch.get(i), 0.0);
        }
    }
    scratch.clear();
}

/// Individual-user-to-individual-item fairness:
/// `1/(m n) sum_u sum_i (E(u,i) - E*(u,i))^2`.
pub fn iif(ctx: &EvalContext, cfg: &JointConfig) -> Result<UserScores> {
    let n = ctx.num_items() as f64;
    let mut scratch = Scratch::new(ctx.num_items());
    let per_user = (0..ctx.num_users())
        .map(|u| {
            let mut sum = 0.0;
            for_each_exposure(ctx, u, cfg.gamma_iif, &mut scratch, |_, e, t| sum += (e - t).powi(2));
            sum / n
        })
        .collect();
    Ok(UserScores::mean_of(per_user))
}

/// All-users-to-individual-item fairness:
/// `1/n sum_i (mean_u E(u,i) - mean_u E*(u,i))^2`.
pub fn aif(ctx: &EvalContext, cfg: &JointConfig) -> Result<ItemScores> {
    let m = ctx.num_users().max(1) as f64;
    let mut scratch = Scratch::new(ctx.num_items());
    let mut diff = vec![0.0; ctx.num_items()];
    for u in 0..ctx.num_users() {
        for_each_exposure(ctx, u, cfg.gamma_iif, &mut scratch, |i, e, t| diff[i as usize] += (e - t) / m);
    }
    Ok(ItemScores::mean_of(diff.into_iter().map(|d| d * d).collect()))
}
