use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    /// An operation that requires a verified structure was handed one that
    /// fails verification. Carries the name of the first failing condition.
    #[error("structure not verified: {0}")]
    NotVerified(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("receiver {receiver} is missing side information for {vertex}")]
    MissingSideValue { receiver: String, vertex: String },

    #[error("decoding plan: {0}")]
    Plan(String),

    #[error("tree construction: {0}")]
    Tree(String),

    #[error("acyclic witness: {0}")]
    Witness(String),

    #[error("fixture {name}: {reason}")]
    Fixture { name: String, reason: String },

    #[error("infeasible profile: {0}")]
    Profile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
