//! Data model, file ingestion and dataset preprocessing.

mod interactions;
mod qrels;
mod run;
mod validate;

pub use interactions::{
    binarize, kcore_filter, load_interactions, read_interactions, split, Column, ColumnSchema, Interaction,
    SplitBundle, SplitMode, MIN_TRAIN_INTERACTIONS,
};
pub use qrels::RelevanceTable;
pub use run::{RankedList, RunData};
pub use validate::{validate, ValidationReport};
