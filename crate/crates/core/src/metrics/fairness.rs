//! Fairness-only measures over the item exposure distribution.
//!
//! All of them treat the whole item universe as the population, so items
//! that never reach a top-k list count as zero-exposure items.

use serde::Serialize;

use crate::corpus::RunData;
use crate::error::{Error, Result};
use crate::metrics::EvalContext;

/// Number of top-k appearances of every item in the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExposureVector {
    counts: Vec<u64>,
    total: u64,
}

impl ExposureVector {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    /// Counts over the evaluation universe of `ctx`.
    pub fn from_context(ctx: &EvalContext) -> Self {
        let mut counts = vec![0u64; ctx.num_items()];
        for u in 0..ctx.num_users() {
            for w in 0..ctx.rounds() {
                for &i in ctx.top(u, w) {
                    counts[i as usize] += 1;
                }
            }
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn num_items(&self) -> usize {
        self.counts.len()
    }

    fn require_exposure(&self) -> Result<()> {
        if self.total == 0 || self.counts.is_empty() {
            Err(Error::UndefinedInput("no item received exposure".into()))
        } else {
            Ok(())
        }
    }
}

/// Top-k exposure counts over the run's own item universe.
pub fn exposure_counts(run: &RunData, k: usize) -> Result<ExposureVector> {
    run.require_depth(k)?;
    let mut counts = vec![0u64; run.items().len()];
    for u in 0..run.num_users() {
        for list in run.user_lists(u) {
            for &i in &list.items()[..k] {
                counts[i as usize] += 1;
            }
        }
    }
    Ok(ExposureVector::from_counts(counts))
}

/// Jain index `(sum x)^2 / (n sum x^2)`.
pub fn jain(x: &ExposureVector) -> Result<f64> {
    x.require_exposure()?;
    let sum = x.total as f64;
    let sq: f64 = x.counts.iter().map(|&c| (c as f64).powi(2)).sum();
    Ok(sum * sum / (x.num_items() as f64 * sq))
}

/// Share of the universe that appears in at least one top-k list.
pub fn qf(x: &ExposureVector) -> Result<f64> {
    if x.counts.is_empty() {
        return Err(Error::UndefinedInput("empty item universe".into()));
    }
    Ok(x.counts.iter().filter(|&&c| c > 0).count() as f64 / x.num_items() as f64)
}

/// Shannon entropy of the exposure shares, normalized by `log n`.
pub fn entropy(x: &ExposureVector) -> Result<f64> {
    x.require_exposure()?;
    if x.num_items() == 1 {
        return Ok(1.0);
    }
    // -sum p ln p written as ln T - (1/T) sum c ln c: exact for unit counts.
    let total = x.total as f64;
    let weighted: f64 = x.counts.iter().filter(|&&c| c > 1).map(|&c| c as f64 * (c as f64).ln()).sum();
    let h = total.ln() - weighted / total;
    Ok((h / (x.num_items() as f64).ln()).clamp(0.0, 1.0))
}

/// Fair exposure share `floor(total / n)`, at least 1.
pub fn fair_share(x: &ExposureVector) -> u64 {
    (x.total / x.num_items().max(1) as u64).max(1)
}

/// Fraction of items whose exposure reaches the fair share.
pub fn fsat(x: &ExposureVector) -> Result<f64> {
    x.require_exposure()?;
    let share = fair_share(x);
    Ok(x.counts.iter().filter(|&&c| c >= share).count() as f64 / x.num_items() as f64)
}

/// Gini index over ascending counts; 0 means perfectly equal exposure.
pub fn gini(x: &ExposureVector) -> Result<f64> {
    x.require_exposure()?;
    let mut sorted = x.counts.clone();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(idx, &c)| (2.0 * (idx + 1) as f64 - n - 1.0) * c as f64)
        .sum();
    Ok(weighted / (n * x.total as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FairScores {
    pub jain: f64,
    pub qf: f64,
    pub entropy: f64,
    pub fsat: f64,
    pub gini: f64,
}

pub fn fair_eval(x: &ExposureVector) -> Result<FairScores> {
    Ok(FairScores {
        jain: jain(x)?,
        qf: qf(x)?,
        entropy: entropy(x)?,
        fsat: fsat(x)?,
        gini: gini(x)?,
    })
}
