use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants are grouped so that the command-line front end can map
/// them onto stable exit codes (see [`CmError::exit_code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("characteristic {0} is not prime")]
    NotPrime(u64),

    #[error("extension degree {0} out of range 1..=8")]
    DegreeOutOfRange(u32),

    #[error("field order {0} is too large for exact table arithmetic")]
    FieldTooLarge(u128),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("elements belong to different ambient rings")]
    AmbientMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("field too small: {reason} (try extension degree {suggested_degree})")]
    FieldTooSmall {
        reason: String,
        suggested_degree: u32,
    },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("coefficients are not interpretable over F_{prime}: {detail}")]
    IncompatibleCoefficients { prime: u32, detail: String },
}

impl CmError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CmError::TruncationInsufficient(_) => 2,
            CmError::FieldTooSmall { .. } => 3,
            CmError::BudgetExceeded(_) => 4,
            _ => 1,
        }
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        CmError::Precondition(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CmError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CmError>;
