//! Position-based examination (exposure weight) functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Examination function applied to a 1-based rank `z` under cutoff `k`.
///
/// | kind                | weight             |
/// |---------------------|--------------------|
/// | `Linear`            | `k + 1 - z`        |
/// | `NormalizedLinear`  | `(k - z) / (k - 1)`|
/// | `Dcg`               | `1 / log2(z + 1)`  |
/// | `Rbp { gamma }`     | `gamma^(z - 1)`    |
/// | `Inverse`           | `1 / z`            |
///
/// Ranks beyond the cutoff receive no exposure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExamSpec {
    Linear,
    NormalizedLinear,
    Dcg,
    Rbp { gamma: f64 },
    Inverse,
}

impl ExamSpec {
    /// RBP examination with patience `gamma` in `(0, 1)`.
    pub fn rbp(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(ExamSpec::Rbp { gamma })
        } else {
            Err(Error::Domain(format!("RBP patience {gamma} outside (0, 1)")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExamSpec::Linear => "linear",
            ExamSpec::NormalizedLinear => "normalized_linear",
            ExamSpec::Dcg => "dcg",
            ExamSpec::Rbp { .. } => "rbp",
            ExamSpec::Inverse => "inverse",
        }
    }

    /// Exposure weight of rank `z` under cutoff `k`.
    pub fn weight(&self, z: usize, k: usize) -> Result<f64> {
        if z < 1 {
            return Err(Error::Domain(format!("rank {z} must be at least 1")));
        }
        if k < 1 {
            return Err(Error::DegenerateCutoff(k));
        }
        if let ExamSpec::NormalizedLinear = self {
            if k < 2 {
                return Err(Error::DegenerateCutoff(k));
            }
        }
        if let ExamSpec::Rbp { gamma } = *self {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::Domain(format!("RBP patience {gamma} outside (0, 1)")));
            }
        }
        if z > k {
            return Ok(0.0);
        }
        Ok(self.weight_unchecked(z, k))
    }

    /// Weight without cutoff or argument checks; callers guarantee
    /// `1 <= z` and a valid `k`.
    #[inline]
    pub(crate) fn weight_unchecked(&self, z: usize, k: usize) -> f64 {
        match *self {
            ExamSpec::Linear => (k + 1 - z) as f64,
            ExamSpec::NormalizedLinear => (k - z) as f64 / (k - 1) as f64,
            ExamSpec::Dcg => dcg_discount(z),
            ExamSpec::Rbp { gamma } => gamma.powi(z as i32 - 1),
            ExamSpec::Inverse => 1.0 / z as f64,
        }
    }

    /// Weights for ranks `1..=k`.
    pub fn curve(&self, k: usize) -> Result<Vec<f64>> {
        (1..=k).map(|z| self.weight(z, k)).collect()
    }
}

#[inline]
pub(crate) fn dcg_discount(z: usize) -> f64 {
    1.0 / ((z + 1) as f64).log2()
}

/// `H_k = sum_{p <= k} 1/p`.
pub(crate) fn harmonic(k: usize) -> f64 {
    (1..=k).map(|p| 1.0 / p as f64).sum()
}
