use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    /// Rank gaps, duplicated items or missing rounds inside run lists.
    #[error("malformed run: {message} (lists: {})", format_lists(.lists))]
    Structural {
        message: String,
        lists: Vec<(String, u32)>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("list of user {user} round {round} has depth {depth}, but {required} is required")]
    Depth {
        user: String,
        round: u32,
        depth: usize,
        required: usize,
    },

    #[error("relevant item {item} has no rank for user {user} (measure needs full rankings)")]
    MissingRank { user: String, item: String },

    #[error("cutoff k={0} is degenerate for this measure")]
    DegenerateCutoff(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined input: {0}")]
    UndefinedInput(String),

    #[error("user {0} is not part of the relevance table")]
    UnknownUser(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn format_lists(lists: &[(String, u32)]) -> String {
    let shown: Vec<String> = lists
        .iter()
        .take(10)
        .map(|(u, w)| format!("{u}@{w}"))
        .collect();
    let mut out = shown.join(", ");
    if lists.len() > 10 {
        out.push_str(&format!(", ... ({} total)", lists.len()));
    }
    out
}
