//! Relevance-only measures: HR, MRR, P, R, MAP and NDCG at cutoff k.
//!
//! An item counts as relevant when its grade is positive. Scores are
//! averaged over rounds per user, then macro-averaged over users that have
//! at least one relevant item.

use serde::Serialize;

use crate::examination::dcg_discount;
use crate::metrics::EvalContext;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RelScores {
    pub hr: f64,
    pub mrr: f64,
    pub precision: f64,
    pub recall: f64,
    pub map: f64,
    pub ndcg: f64,
    /// Users left out of the averages for having no relevant item.
    pub excluded_users: usize,
}

impl RelScores {
    fn add(&mut self, other: &RelScores) {
        self.hr += other.hr;
        self.mrr += other.mrr;
        self.precision += other.precision;
        self.recall += other.recall;
        self.map += other.map;
        self.ndcg += other.ndcg;
    }

    // Sum first, divide once: a mean of ones stays exactly one.
    fn divide(&mut self, count: usize) {
        let c = count as f64;
        for v in [
            &mut self.hr,
            &mut self.mrr,
            &mut self.precision,
            &mut self.recall,
            &mut self.map,
            &mut self.ndcg,
        ] {
            *v /= c;
        }
    }
}

/// Scores of a single list against a user's relevant set.
fn score_list(top: &[u32], is_relevant: impl Fn(u32) -> bool, num_relevant: usize, k: usize) -> RelScores {
    let mut hits = 0usize;
    let mut first = None;
    let mut ap = 0.0;
    let mut dcg = 0.0;
    for (pos, &i) in top.iter().enumerate() {
        if is_relevant(i) {
            hits += 1;
            let z = pos + 1;
            first.get_or_insert(z);
            ap += hits as f64 / z as f64;
            dcg += dcg_discount(z);
        }
    }
    let ideal: f64 = (1..=num_relevant.min(k)).map(dcg_discount).sum();
    RelScores {
        hr: if hits > 0 { 1.0 } else { 0.0 },
        mrr: first.map_or(0.0, |z| 1.0 / z as f64),
        precision: hits as f64 / k as f64,
        recall: hits as f64 / num_relevant as f64,
        map: ap / num_relevant.min(k) as f64,
        ndcg: dcg / ideal,
        excluded_users: 0,
    }
}

/// Per-user relevance scores (`None` for users without relevant items).
pub fn rel_per_user(ctx: &EvalContext) -> Vec<Option<RelScores>> {
    let k = ctx.k();
    (0..ctx.num_users())
        .map(|u| {
            let relevant = ctx.relevant(u);
            if relevant.is_empty() {
                return None;
            }
            let is_rel = |i: u32| relevant.binary_search_by_key(&i, |e| e.0).is_ok();
            let mut acc = RelScores::default();
            for w in 0..ctx.rounds() {
                acc.add(&score_list(ctx.top(u, w), is_rel, relevant.len(), k));
            }
            acc.divide(ctx.rounds());
            Some(acc)
        })
        .collect()
}

/// Macro-averaged relevance scores. When no user has a relevant item every
/// score is 0.
pub fn rel_eval(ctx: &EvalContext) -> RelScores {
    let per_user = rel_per_user(ctx);
    let included = per_user.iter().flatten().count();
    let mut out = RelScores {
        excluded_users: per_user.len() - included,
        ..RelScores::default()
    };
    if included > 0 {
        for s in per_user.iter().flatten() {
            out.add(s);
        }
        out.divide(included);
    }
    out
}
