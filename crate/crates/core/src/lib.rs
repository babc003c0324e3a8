//! Joint item-fairness and relevance evaluation for recommender rankings.
//!
//! The crate computes relevance-only measures (HR, MRR, P, R, MAP, NDCG),
//! exposure-based fairness measures (Jain, QF, entropy, FSat, Gini) and the
//! joint measures that condition item exposure on relevance (IAA, IFD,
//! HD, MME, IBO/IWO, II-F, AI-F). It also ships the preprocessing needed to
//! build evaluation data, a CombMNZ fairness re-ranker and the diagnostic
//! experiments used to study how these measures behave.
//!
//! ```
//! use fairrel::corpus::{RelevanceTable, RunData};
//! use fairrel::metrics::{evaluate, JointConfig, Measure};
//!
//! let run = RunData::from_single_round(vec![("u1", vec!["a", "b", "c"])]).unwrap();
//! let rel = RelevanceTable::from_triples([("u1", "a", 1.0)]).unwrap();
//! let cfg = JointConfig::default().with_k(2);
//! let eval = evaluate(&run, &rel, &cfg, &[Measure::Ndcg, Measure::Gini]).unwrap();
//! assert_eq!(eval.get(Measure::Ndcg), Some(1.0));
//! ```

#[cfg(feature = "cli")]
pub mod cli;
pub mod corpus;
pub mod error;
pub mod examination;
pub mod experiments;
pub mod ids;
pub mod metrics;
pub mod rerank;
pub mod report;

pub use error::{Error, Result};
