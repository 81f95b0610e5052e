//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} is not part of this hypergraph")]
    NodeNotFound(String),
    #[error("operation requires a non-empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("no archetype in the catalog matches label tuple {0}")]
    NoMatchingArchetype(String),
    #[error("archetype '{0}' has no prototype value tuple")]
    PrototypeUnavailable(String),
    #[error("feature '{feature}' missing for node {node}")]
    MissingFeature { feature: String, node: String },
    #[error("undefined: {0}")]
    Undefined(&'static str),
    #[error("infeasible generator spec: {0}")]
    SpecError(String),
    #[error("malformed row at line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("required column '{0}' is missing")]
    MissingColumn(String),
    #[error("lexicon format error: {0}")]
    LexiconFormat(String),
    #[error("incidence list for node {node} has {len} entries, above the configured cap {cap}")]
    IncidenceCapExceeded { node: String, len: usize, cap: usize },
    #[error("stage '{stage}' failed: {source}")]
    StageFailure {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::StageFailure {
            stage,
            source: Box::new(self),
        }
    }

    /// Exit code contract: 2 for input/format errors (including ingest
    /// failures), 3 for downstream stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StageFailure { stage: "ingest", .. } => 2,
            Error::StageFailure { .. } => 3,
            _ => 2,
        }
    }

    /// Stage name when this is a stage failure.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::StageFailure { stage, .. } => Some(stage),
            _ => None,
        }
    }
}
