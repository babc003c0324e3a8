//! Joint fairness + relevance measures.
//!
//! Every measure reads an [`EvalContext`](crate::metrics::EvalContext) and returns its aggregate together
//! with the per-user or per-item decomposition it averages over.

mod expected_exposure;
mod hd;
mod iaa;
mod ifd;
pub(crate) mod impact;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expected_exposure::{aif, iif, target_exposure};
pub use hd::{hd, hellinger, HdScore};
pub use iaa::iaa;
pub use ifd::{ifd_div, ifd_mul};
pub use impact::{ibo_iwo, mme, Dominance, ImpactTable};

/// Ordering of equally relevant items in the HD reference list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "seed")]
pub enum TieBreak {
    /// Item identifier ascending.
    #[default]
    Deterministic,
    /// Seeded shuffle within each grade level.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig {
    pub k: usize,
    /// RBP patience of the HD click model.
    pub gamma_hd: f64,
    /// RBP patience of II-F and AI-F.
    pub gamma_iif: f64,
    /// Relative impact change that counts as better or worse off.
    pub impact_threshold: f64,
    pub hd_tiebreak: TieBreak,
}

impl Default for JointConfig {
    fn default() -> Self {
        Self {
            k: 10,
            gamma_hd: 0.9,
            gamma_iif: 0.8,
            impact_threshold: 0.10,
            hd_tiebreak: TieBreak::Deterministic,
        }
    }
}

impl JointConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        for (name, g) in [("gamma_hd", self.gamma_hd), ("gamma_iif", self.gamma_iif)] {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::Config(format!("{name}={g} outside (0, 1)")));
            }
        }
        if !(self.impact_threshold > 0.0) || !self.impact_threshold.is_finite() {
            return Err(Error::Config(format!(
                "impact threshold {} must be positive",
                self.impact_threshold
            )));
        }
        Ok(())
    }
}

/// Aggregate with its per-user terms (aligned with the run's user order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserScores {
    pub value: f64,
    pub per_user: Vec<f64>,
}

impl UserScores {
    fn mean_of(per_user: Vec<f64>) -> Self {
        let value = if per_user.is_empty() {
            0.0
        } else {
            per_user.iter().sum::<f64>() / per_user.len() as f64
        };
        Self { value, per_user }
    }
}

/// Aggregate with its per-item terms (evaluation item universe order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemScores {
    pub value: f64,
    pub per_item: Vec<f64>,
}

impl ItemScores {
    fn mean_of(per_item: Vec<f64>) -> Self {
        let value = if per_item.is_empty() {
            0.0
        } else {
            per_item.iter().sum::<f64>() / per_item.len() as f64
        };
        Self { value, per_item }
    }
}

/// Dense scratch accumulator over the item universe that remembers which
/// slots were touched so it can be cleared in time proportional to use.
pub(crate) struct Scratch {
    values: Vec<f64>,
    touched: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            values: vec![f64::NAN; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, i: u32, v: f64) {
        let slot = &mut self.values[i as usize];
        if slot.is_nan() {
            *slot = v;
            self.touched.push(i);
        } else {
            *slot += v;
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: u32) -> f64 {
        let v = self.values[i as usize];
        if v.is_nan() {
            0.0
        } else {
            v
        }
    }

    pub(crate) fn touched(&self) -> &[u32] {
        &self.touched
    }

    pub(crate) fn clear(&mut self) {
        for &i in &self.touched {
            self.values[i as usize] = f64::NAN;
        }
        self.touched.clear();
    }
}
