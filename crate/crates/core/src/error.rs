use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum EfxError {
    /// Input that is syntactically fine but violates a data invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An exhaustive routine was asked to enumerate more than its configured cap.
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The instance is outside the class the solver handles (sharing structure,
    /// monotonicity, MMS-feasibility, degeneracy).
    #[error("unsupported instance: {0}")]
    Structure(String),

    /// A solver invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, EfxError>;
