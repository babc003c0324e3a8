//! CombMNZ fusion of relevance and exposure-based fairness scores.
//!
//! For each list the top-`k'` candidates are re-scored with
//!
//! ```text
//! s_rel  = min-max normalized predicted score over the candidates
//! s_fair = 1 - coverage / max coverage over the candidates
//! fused  = (s_rel + s_fair) * |{ s in (s_rel, s_fair) : s > 0 }|
//! ```
//!
//! where coverage counts top-`k` appearances across the whole base run.
//! Candidates are sorted by fused score, ties by original rank.

use serde::Serialize;

use crate::corpus::{RankedList, RunData};
use crate::error::{Error, Result};
use crate::metrics::exposure_counts;

pub const DEFAULT_K_PRIME: usize = 25;
pub const DEFAULT_K: usize = 10;

/// Top-`k` appearance count of every item of the run (run item indices).
pub fn coverage_scores(run: &RunData, k: usize) -> Result<Vec<u64>> {
    Ok(exposure_counts(run, k)?.counts().to_vec())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RerankReport {
    /// Lists that had fewer than `k'` candidates.
    pub short_lists: Vec<(String, u32)>,
    pub warnings: Vec<String>,
}

/// Re-ranks the top-`k_prime` candidates of every list. Output lists hold
/// the `k_prime` candidates (fewer when the input is shorter) with their
/// fused scores.
pub fn combmnz_rerank(run: &RunData, k_prime: usize, k: usize) -> Result<(RunData, RerankReport)> {
    if k == 0 || k > k_prime {
        return Err(Error::Config(format!("need 1 <= k <= k' (k={k}, k'={k_prime})")));
    }
    let coverage = coverage_scores(run, k)?;
    let mut report = RerankReport::default();
    let mut lists = Vec::with_capacity(run.num_users());
    for u in 0..run.num_users() {
        let mut per_round = Vec::with_capacity(run.rounds() as usize);
        for (w, list) in run.user_lists(u).iter().enumerate() {
            let user = run.users().name(u as u32);
            if list.len() < k_prime {
                report.short_lists.push((user.to_owned(), w as u32 + 1));
            }
            let scores = list.scores().ok_or_else(|| {
                Error::UndefinedInput(format!("list of user {user} round {} has no predicted scores", w + 1))
            })?;
            let depth = k_prime.min(list.len());
            per_round.push(fuse(&list.items()[..depth], &scores[..depth], &coverage));
        }
        lists.push(per_round);
    }
    if !report.short_lists.is_empty() {
        report.warnings.push(format!(
            "{} lists have fewer than k'={k_prime} candidates; re-ranked what was available",
            report.short_lists.len()
        ));
    }
    Ok((run.with_lists(lists)?, report))
}

/// Appends, below each re-ranked list, the items of the original list it
/// does not contain, in their original order. Scores are dropped since the
/// fused and predicted scales differ.
pub fn append_tail(reranked: &RunData, original: &RunData) -> Result<RunData> {
    if reranked.users() != original.users() || reranked.rounds() != original.rounds() {
        return Err(Error::Schema("re-ranked run does not match the original run".into()));
    }
    let mut seen = vec![false; original.items().len()];
    let lists = (0..original.num_users())
        .map(|u| {
            (0..original.rounds() as usize)
                .map(|w| {
                    let head = reranked.list(u, w).items();
                    let mut items = head.to_vec();
                    for &i in head {
                        seen[i as usize] = true;
                    }
                    items.extend(original.list(u, w).items().iter().filter(|&&i| !seen[i as usize]));
                    for &i in head {
                        seen[i as usize] = false;
                    }
                    RankedList::new(items)
                })
                .collect()
        })
        .collect();
    original.with_lists(lists)
}

fn fuse(items: &[u32], predicted: &[f64], coverage: &[u64]) -> RankedList {
    let (lo, hi) = predicted
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let max_cov = items.iter().map(|&i| coverage[i as usize]).max().unwrap_or(0);
    let mut fused: Vec<(usize, f64)> = items
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(pos, (&i, &s))| {
            let s_rel = if hi > lo { (s - lo) / (hi - lo) } else { 0.0 };
            let s_fair = if max_cov > 0 {
                1.0 - coverage[i as usize] as f64 / max_cov as f64
            } else {
                1.0
            };
            let nonzero = (s_rel > 0.0) as u8 + (s_fair > 0.0) as u8;
            (pos, (s_rel + s_fair) * nonzero as f64)
        })
        .collect();
    fused.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let order: Vec<u32> = fused.iter().map(|&(pos, _)| items[pos]).collect();
    let scores: Vec<f64> = fused.iter().map(|e| e.1).collect();
    RankedList::with_scores(order, scores).expect("equal lengths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::Interner;

    fn scored_run(lists: Vec<(&str, Vec<(&str, f64)>)>) -> RunData {
        let mut users = Interner::new();
        let mut items = Interner::new();
        let mut dense = Vec::new();
        for (u, entries) in lists {
            users.intern(u);
            let ids = entries.iter().map(|e| items.intern(e.0)).collect();
            let scores = entries.iter().map(|e| e.1).collect();
            dense.push(vec![RankedList::with_scores(ids, scores).unwrap()]);
        }
        RunData::new(users, items, dense).unwrap()
    }

    fn names(run: &RunData, u: usize) -> Vec<&str> {
        run.list(u, 0).items().iter().map(|&i| run.items().name(i)).collect()
    }

    #[test]
    fn top_scored_uncovered_item_wins() {
        // k = 1: "a" and "b" are covered; "z" has the top score but sits
        // below the cutoff everywhere.
        let run = scored_run(vec![
            ("u", vec![("a", 0.5), ("z", 0.9), ("c", 0.1)]),
            ("v", vec![("b", 0.9), ("a", 0.5), ("c", 0.1)]),
        ]);
        let (out, report) = combmnz_rerank(&run, 3, 1).unwrap();
        assert!(report.warnings.is_empty());
        assert_eq!(names(&out, 0)[0], "z");
        assert_eq!(out.list(0, 0).scores().unwrap()[0], 4.0);
    }

    #[test]
    fn constant_scores_and_coverage_keep_order() {
        let run = scored_run(vec![("u", vec![("a", 1.0), ("b", 1.0), ("c", 1.0)])]);
        // k = 3: every candidate has coverage 1 -> s_fair = 0, s_rel = 0
        let (out, _) = combmnz_rerank(&run, 3, 3).unwrap();
        assert_eq!(names(&out, 0), ["a", "b", "c"]);
        assert!(out.list(0, 0).scores().unwrap().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn zero_zero_candidate_is_last() {
        // k = 1, "a" covered and lowest score -> both components 0.
        let run = scored_run(vec![("u", vec![("a", 0.0), ("b", 0.5), ("c", 1.0)])]);
        let (out, _) = combmnz_rerank(&run, 3, 1).unwrap();
        assert_eq!(*names(&out, 0).last().unwrap(), "a");
    }

    #[test]
    fn output_is_permutation_of_candidates() {
        let run = scored_run(vec![("u", vec![("a", 0.3), ("b", 0.2), ("c", 0.9), ("d", 0.1)])]);
        let (out, _) = combmnz_rerank(&run, 3, 2).unwrap();
        let mut got = names(&out, 0);
        got.sort();
        assert_eq!(got, ["a", "b", "c"]);
    }

    #[test]
    fn short_lists_warn() {
        let run = scored_run(vec![("u", vec![("a", 0.3), ("b", 0.2)])]);
        let (out, report) = combmnz_rerank(&run, 5, 2).unwrap();
        assert_eq!(out.list(0, 0).len(), 2);
        assert_eq!(report.short_lists, vec![("u".to_string(), 1)]);
    }

    #[test]
    fn missing_scores_fail() {
        let run = RunData::from_single_round(vec![("u", vec!["a", "b"])]).unwrap();
        assert!(matches!(combmnz_rerank(&run, 2, 1), Err(Error::UndefinedInput(_))));
    }

    #[test]
    fn tail_restores_full_depth() {
        let run = scored_run(vec![("u", vec![("a", 0.3), ("b", 0.2), ("c", 0.9), ("d", 0.1)])]);
        let (out, _) = combmnz_rerank(&run, 2, 1).unwrap();
        let full = append_tail(&out, &run).unwrap();
        assert_eq!(names(&full, 0)[2..], ["c", "d"]);
        assert_eq!(names(&full, 0)[..2], names(&out, 0)[..]);
        assert!(full.list(0, 0).scores().is_none());
    }

    #[test]
    fn coverage_accumulates() {
        let run = RunData::new(
            Interner::from_names(["u", "v"]),
            Interner::from_names(["a", "b", "c"]),
            vec![
                vec![RankedList::new(vec![0, 1, 2]), RankedList::new(vec![0, 2, 1])],
                vec![RankedList::new(vec![0, 1, 2]), RankedList::new(vec![1, 0, 2])],
            ],
        )
        .unwrap();
        assert_eq!(coverage_scores(&run, 1).unwrap(), vec![3, 1, 0]);
    }
}
