//! Relevance-only, fairness-only and joint measures, plus a single entry
//! point that evaluates any subset of them.

mod context;
pub mod fairness;
pub mod joint;
pub mod relevance;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{RelevanceTable, RunData};
use crate::error::{Error, Result};

pub use context::EvalContext;
pub use fairness::{exposure_counts, ExposureVector, FairScores};
pub use joint::{JointConfig, TieBreak};
pub use relevance::RelScores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Rel,
    Fair,
    Joint,
}

/// The twenty measures the toolkit computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Measure {
    Hr,
    Mrr,
    Precision,
    Recall,
    Map,
    Ndcg,
    Jain,
    Qf,
    Entropy,
    Fsat,
    Gini,
    Ibo,
    Iwo,
    Iaa,
    IfdDiv,
    IfdMul,
    Hd,
    Mme,
    IiF,
    AiF,
}

impl Measure {
    pub const ALL: [Measure; 20] = [
        Measure::Hr,
        Measure::Mrr,
        Measure::Precision,
        Measure::Recall,
        Measure::Map,
        Measure::Ndcg,
        Measure::Jain,
        Measure::Qf,
        Measure::Entropy,
        Measure::Fsat,
        Measure::Gini,
        Measure::Ibo,
        Measure::Iwo,
        Measure::Iaa,
        Measure::IfdDiv,
        Measure::IfdMul,
        Measure::Hd,
        Measure::Mme,
        Measure::IiF,
        Measure::AiF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Hr => "hr",
            Measure::Mrr => "mrr",
            Measure::Precision => "precision",
            Measure::Recall => "recall",
            Measure::Map => "map",
            Measure::Ndcg => "ndcg",
            Measure::Jain => "jain",
            Measure::Qf => "qf",
            Measure::Entropy => "entropy",
            Measure::Fsat => "fsat",
            Measure::Gini => "gini",
            Measure::Ibo => "ibo",
            Measure::Iwo => "iwo",
            Measure::Iaa => "iaa",
            Measure::IfdDiv => "ifd_div",
            Measure::IfdMul => "ifd_mul",
            Measure::Hd => "hd",
            Measure::Mme => "mme",
            Measure::IiF => "ii_f",
            Measure::AiF => "ai_f",
        }
    }

    pub fn higher_is_better(self) -> bool {
        matches!(
            self,
            Measure::Hr
                | Measure::Mrr
                | Measure::Precision
                | Measure::Recall
                | Measure::Map
                | Measure::Ndcg
                | Measure::Jain
                | Measure::Qf
                | Measure::Entropy
                | Measure::Fsat
                | Measure::Ibo
        )
    }

    pub fn family(self) -> Family {
        use Measure::*;
        match self {
            Hr | Mrr | Precision | Recall | Map | Ndcg => Family::Rel,
            Jain | Qf | Entropy | Fsat | Gini => Family::Fair,
            _ => Family::Joint,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "p" => "precision",
            "r" => "recall",
            "ent" => "entropy",
            "iif" => "ii_f",
            "aif" => "ai_f",
            "ifd_mult" | "ifd_x" => "ifd_mul",
            other => other,
        };
        Measure::ALL
            .iter()
            .copied()
            .find(|m| m.name() == alias)
            .ok_or_else(|| Error::Config(format!("unknown measure {s:?}")))
    }
}

impl From<Measure> for String {
    fn from(m: Measure) -> String {
        m.name().to_owned()
    }
}

impl TryFrom<String> for Measure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Side information gathered while evaluating.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub users: usize,
    pub items: usize,
    pub rounds: usize,
    /// Users without relevant items, left out of the relevance averages.
    pub rel_excluded_users: usize,
    /// Lists dropped from the HD click average.
    pub hd_zero_click_lists: usize,
    /// Items with at least one relevant user (IBO/IWO denominator).
    pub impact_eligible_items: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scores: Vec<(Measure, f64)>,
    pub diagnostics: Diagnostics,
}

impl Evaluation {
    pub fn get(&self, measure: Measure) -> Option<f64> {
        self.scores.iter().find(|(m, _)| *m == measure).map(|e| e.1)
    }
}

/// Evaluates `measures` (in the given order, duplicates removed) of `run`
/// against `rel` at cutoff `cfg.k`.
pub fn evaluate(run: &RunData, rel: &RelevanceTable, cfg: &JointConfig, measures: &[Measure]) -> Result<Evaluation> {
    cfg.validate()?;
    let ctx = EvalContext::new(run, rel, cfg.k)?;
    evaluate_context(&ctx, cfg, measures)
}

pub fn evaluate_context(ctx: &EvalContext, cfg: &JointConfig, measures: &[Measure]) -> Result<Evaluation> {
    let mut wanted: Vec<Measure> = Vec::with_capacity(measures.len());
    for &m in measures {
        if !wanted.contains(&m) {
            wanted.push(m);
        }
    }
    let mut diagnostics = Diagnostics {
        users: ctx.num_users(),
        items: ctx.num_items(),
        rounds: ctx.rounds(),
        ..Diagnostics::default()
    };

    let needs = |family: Family| wanted.iter().any(|m| m.family() == family);
    let rel_scores = needs(Family::Rel).then(|| relevance::rel_eval(ctx));
    if let Some(r) = &rel_scores {
        diagnostics.rel_excluded_users = r.excluded_users;
    }
    let exposure = needs(Family::Fair).then(|| ExposureVector::from_context(ctx));
    let impact = wanted
        .iter()
        .any(|m| matches!(m, Measure::Ibo | Measure::Iwo | Measure::Mme))
        .then(|| joint::ImpactTable::new(ctx));
    let dominance = match (&impact, wanted.iter().any(|m| matches!(m, Measure::Ibo | Measure::Iwo))) {
        (Some(t), true) => {
            let d = joint::impact::dominance_from_table(t, cfg.impact_threshold)?;
            diagnostics.impact_eligible_items = d.eligible;
            Some(d)
        }
        _ => None,
    };

    let mut scores = Vec::with_capacity(wanted.len());
    for m in wanted {
        let value = match m {
            Measure::Hr => rel_scores.as_ref().map_or(0.0, |r| r.hr),
            Measure::Mrr => rel_scores.as_ref().map_or(0.0, |r| r.mrr),
            Measure::Precision => rel_scores.as_ref().map_or(0.0, |r| r.precision),
            Measure::Recall => rel_scores.as_ref().map_or(0.0, |r| r.recall),
            Measure::Map => rel_scores.as_ref().map_or(0.0, |r| r.map),
            Measure::Ndcg => rel_scores.as_ref().map_or(0.0, |r| r.ndcg),
            Measure::Jain => fairness::jain(exposure.as_ref().expect("exposure computed"))?,
            Measure::Qf => fairness::qf(exposure.as_ref().expect("exposure computed"))?,
            Measure::Entropy => fairness::entropy(exposure.as_ref().expect("exposure computed"))?,
            Measure::Fsat => fairness::fsat(exposure.as_ref().expect("exposure computed"))?,
            Measure::Gini => fairness::gini(exposure.as_ref().expect("exposure computed"))?,
            Measure::Ibo => dominance.as_ref().expect("dominance computed").ibo,
            Measure::Iwo => dominance.as_ref().expect("dominance computed").iwo,
            Measure::Mme => joint::impact::mme_from_table(impact.as_ref().expect("impact computed")).value,
            Measure::Iaa => joint::iaa(ctx, cfg)?.value,
            Measure::IfdDiv => joint::ifd_div(ctx, cfg)?.value,
            Measure::IfdMul => joint::ifd_mul(ctx, cfg)?.value,
            Measure::Hd => {
                let s = joint::hd(ctx, cfg)?;
                diagnostics.hd_zero_click_lists = s.zero_click_lists;
                s.value
            }
            Measure::IiF => joint::iif(ctx, cfg)?.value,
            Measure::AiF => joint::aif(ctx, cfg)?.value,
        };
        scores.push((m, value));
    }
    Ok(Evaluation { scores, diagnostics })
}
