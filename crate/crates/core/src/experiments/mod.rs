//! Diagnostic experiments: measure agreement, sliding windows, artificial
//! insertion, and the synthetic data they run on.

mod correlation;
mod insertion;
mod sliding;
mod synthetic;

pub use correlation::{correlation_matrix, kendall_tau, CorrelationMatrix, ScoreTable};
pub use insertion::{insertion_run, insertion_sim, InsertionConfig, InsertionStep, InsertionTrajectory};
pub use sliding::{sliding_windows, windowed_run, WindowReport};
pub use synthetic::{synthetic_popularity_run, SyntheticConfig};

/// Zero-padded labels `prefix0000..` so lexical and numeric order agree.
pub(crate) fn labels(prefix: &str, count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).max(1).to_string().len();
    (0..count).map(|i| format!("{prefix}{i:0width$}")).collect()
}
