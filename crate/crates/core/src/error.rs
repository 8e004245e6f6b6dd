use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("infeasible linear system: constraint vectors are dependent with inconsistent targets")]
    Infeasible,

    #[error("vector is not in the analytic core of the operator")]
    NotInCore,

    #[error("the zero vector admits no core chain certificate")]
    ZeroVector,

    #[error("operator must be nonzero")]
    ZeroOperator,

    #[error("operator must have rank at least {required}, found {found}")]
    RankTooSmall { required: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no witness found: {0}")]
    NoWitness(String),

    #[error("malformed scalar {text:?}: {reason}")]
    Scalar { text: String, reason: String },

    #[error("certificate rejected: {0}")]
    Certificate(String),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
