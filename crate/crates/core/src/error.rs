//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unknown {taxonomy} label `{label}`")]
    UnknownLabel {
        path: PathBuf,
        line: usize,
        taxonomy: &'static str,
        label: String,
    },

    #[error("{path}:{line}: duplicate review id `{id}`")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error(
        "{path}:{line}: review `{id}`: `general sickness` cannot be combined with other symptom labels"
    )]
    ExclusivityViolation {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("{path}:{line}: invalid table entry: {message}")]
    InvalidTableEntry {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid split spec: {0}")]
    InvalidSplitSpec(String),

    #[error("cannot split an empty corpus")]
    EmptyCorpus,

    #[error("invalid prompt spec: {0}")]
    InvalidPrompt(String),

    #[error("invalid backend config: {0}")]
    InvalidConfig(String),

    #[error("backend request failed for review `{review_id}`: {message}")]
    Transport { review_id: String, message: String },

    #[error("replay cache miss for review `{review_id}` (key {key})")]
    CacheMiss { review_id: String, key: String },

    #[error("no gold annotation for review `{review_id}`")]
    MissingGold { review_id: String },

    #[error("no prediction for review `{review_id}`")]
    MissingPrediction { review_id: String },

    #[error("prediction for review `{review_id}` carries label `{label}` outside the task taxonomy")]
    LabelOutsideTaxonomy { review_id: String, label: String },

    #[error("review `{review_id}` is missing meta key `{key}`")]
    MissingMetaKey { review_id: String, key: String },

    #[error("task mismatch: expected {expected}, found {found}")]
    TaskMismatch { expected: String, found: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
