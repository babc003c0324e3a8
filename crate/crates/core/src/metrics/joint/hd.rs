use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::metrics::joint::{JointConfig, TieBreak};
use crate::metrics::EvalContext;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HdScore {
    pub value: f64,
    /// Position-aggregated normalized relevance, positions `1..=k`.
    pub relevance: Vec<f64>,
    /// Position-aggregated normalized click probability, positions `1..=k`.
    pub clicks: Vec<f64>,
    /// (user, round) lists left out of the click average for having no
    /// click mass on the reference positions.
    pub zero_click_lists: usize,
}

/// Hellinger distance between the relevance and click distributions over
/// the positions of each user's ground-truth reference list.
///
/// The reference list orders a user's relevant items by grade (ties per
/// `cfg.hd_tiebreak`). Clicks follow a cascade: the item at system position
/// `p` is clicked with probability `r * gamma^p * prod_{j<p} (1 - r_j)`.
/// Click probabilities are normalized per list, mapped onto the reference
/// positions of the clicked items and renormalized. Lists without click
/// mass on reference positions are dropped from the click average; the
/// relevance side averages over all users.
pub fn hd(ctx: &EvalContext, cfg: &JointConfig) -> Result<HdScore> {
    let k = ctx.k();
    let m = ctx.num_users();
    let gamma = cfg.gamma_hd;
    let mut q = vec![0.0; k];
    let mut c = vec![0.0; k];
    let mut counted = 0usize;
    let mut zero_click_lists = 0usize;

    let mut click = vec![0.0; k];
    let mut c_star = vec![0.0; k];
    for u in 0..m {
        let relevant = ctx.relevant(u);
        let reference = reference_order(ctx, u, relevant, cfg.hd_tiebreak);
        let total_grade: f64 = relevant.iter().map(|e| e.1).sum();
        if total_grade > 0.0 {
            for (p, &j) in reference.iter().take(k).enumerate() {
                q[p] += relevant[j].1 / total_grade;
            }
        }

        for w in 0..ctx.rounds() {
            let top = ctx.top(u, w);
            let mut survive = 1.0;
            let mut gamma_pow = 1.0;
            for (p, &i) in top.iter().enumerate() {
                gamma_pow *= gamma;
                let r = grade_of(relevant, i);
                click[p] = r * gamma_pow * survive;
                survive *= 1.0 - r;
            }
            let click_mass: f64 = click.iter().sum();
            if click_mass <= 0.0 {
                zero_click_lists += 1;
                continue;
            }
            c_star.iter_mut().for_each(|v| *v = 0.0);
            for (p, &j) in reference.iter().take(k).enumerate() {
                let item = relevant[j].0;
                if let Some(pos) = top.iter().position(|&i| i == item) {
                    c_star[p] = click[pos] / click_mass;
                }
            }
            let star_mass: f64 = c_star.iter().sum();
            if star_mass <= 0.0 {
                zero_click_lists += 1;
                continue;
            }
            for p in 0..k {
                c[p] += c_star[p] / star_mass;
            }
            counted += 1;
        }
    }
    q.iter_mut().for_each(|v| *v /= m.max(1) as f64);
    if counted > 0 {
        c.iter_mut().for_each(|v| *v /= counted as f64);
    }
    Ok(HdScore {
        value: hellinger(&q, &c),
        relevance: q,
        clicks: c,
        zero_click_lists,
    })
}

/// `1/sqrt(2) * || sqrt(q) - sqrt(c) ||_2`
pub fn hellinger(q: &[f64], c: &[f64]) -> f64 {
    let sq: f64 = q.iter().zip(c).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum();
    sq.sqrt() / std::f64::consts::SQRT_2
}

fn grade_of(relevant: &[(u32, f64)], i: u32) -> f64 {
    relevant
        .binary_search_by_key(&i, |e| e.0)
        .map_or(0.0, |j| relevant[j].1)
}

/// Indices into `relevant`, best grade first.
fn reference_order(ctx: &EvalContext, u: usize, relevant: &[(u32, f64)], tiebreak: TieBreak) -> Vec<usize> {
    let mut order: Vec<usize> = (0..relevant.len()).collect();
    match tiebreak {
        TieBreak::Deterministic => order.sort_by(|&a, &b| {
            relevant[b].1.total_cmp(&relevant[a].1).then_with(|| {
                let na = ctx.judged_item_name(relevant[a].0).unwrap_or("");
                let nb = ctx.judged_item_name(relevant[b].0).unwrap_or("");
                na.cmp(nb)
            })
        }),
        TieBreak::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let keys: Vec<u64> = order.iter().map(|_| rng.random()).collect();
            order.sort_by(|&a, &b| relevant[b].1.total_cmp(&relevant[a].1).then(keys[a].cmp(&keys[b])));
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{RelevanceTable, RunData};

    #[test]
    fn ideal_single_relevant_scores_zero() {
        let run = RunData::from_single_round(vec![("u", vec!["a", "x", "y"]), ("v", vec!["b", "x", "y"])]).unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0), ("v", "b", 1.0)]).unwrap();
        let ctx = EvalContext::new(&run, &rel, 3).unwrap();
        let s = hd(&ctx, &JointConfig::default().with_k(3)).unwrap();
        assert!(s.value.abs() < 1e-12);
        assert_eq!(s.zero_click_lists, 0);
    }

    #[test]
    fn disjoint_distributions_are_at_distance_one() {
        assert!((hellinger(&[0.0, 1.0], &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(hellinger(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
    }

    #[test]
    fn clicks_map_to_reference_positions() {
        // reference [a, b] (equal grades, name order); system shows b then a.
        // b is clicked with 0.9 and stops the cascade, so all click mass
        // lands on reference position 2.
        let run = RunData::from_single_round(vec![("u", vec!["b", "a"])]).unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0), ("u", "b", 1.0)]).unwrap();
        let ctx = EvalContext::new(&run, &rel, 2).unwrap();
        let s = hd(&ctx, &JointConfig::default().with_k(2)).unwrap();
        assert_eq!(s.relevance, vec![0.5, 0.5]);
        assert_eq!(s.clicks, vec![0.0, 1.0]);
        assert!((s.value - hellinger(&[0.5, 0.5], &[0.0, 1.0])).abs() < 1e-15);
    }

    #[test]
    fn zero_click_user_is_dropped() {
        let run = RunData::from_single_round(vec![("u", vec!["a", "x"]), ("v", vec!["x", "y"])]).unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0), ("v", "b", 1.0)]).unwrap();
        let ctx = EvalContext::new(&run, &rel, 2).unwrap();
        let s = hd(&ctx, &JointConfig::default().with_k(2)).unwrap();
        assert_eq!(s.zero_click_lists, 1);
        assert_eq!(s.clicks, vec![1.0, 0.0]);
        assert_eq!(s.relevance, vec![1.0, 0.0]);
        assert!(s.value.abs() < 1e-12);
    }

    #[test]
    fn seeded_tiebreak_is_reproducible() {
        let run = RunData::from_single_round(vec![("u", vec!["c", "b", "a", "d"])]).unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0), ("u", "b", 1.0), ("u", "c", 1.0)]).unwrap();
        let ctx = EvalContext::new(&run, &rel, 3).unwrap();
        let cfg = JointConfig {
            hd_tiebreak: TieBreak::Seeded(11),
            ..JointConfig::default().with_k(3)
        };
        assert_eq!(hd(&ctx, &cfg).unwrap(), hd(&ctx, &cfg).unwrap());
        let det = JointConfig::default().with_k(3);
        assert_eq!(hd(&ctx, &det).unwrap(), hd(&ctx, &det).unwrap());
    }
}
