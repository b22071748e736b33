//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CkError {
    #[error("coefficient ring: {0}")]
    Ring(String),
    #[error("algebra: {0}")]
    Algebra(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("tensor arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("rewrite step budget exceeded (inconsistent relation table?)")]
    StepBudget,
    #[error("missing rewrite rule: {0}")]
    MissingRule(String),
    #[error("contraction index {0} out of range 1..={1}")]
    ContractionIndex(usize, usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("compatibility checks failed; refusing to build: {0}")]
    CompatibilityFailed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
