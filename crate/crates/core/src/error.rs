use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("not in convex order")]
    NotInConvexOrder,
    #[error("point is not an atom of the {0} marginal")]
    NotInSupport(&'static str),
    #[error("instance mismatch: {0}")]
    InstanceMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("infinite cost on nonpolar pair ({0}, {1})")]
    InfiniteCostOnNonpolar(usize, usize),
    #[error("{0} requires a seed")]
    MissingSeed(&'static str),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Domain errors map to exit code 2, broken internal invariants to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 1,
            _ => 2,
        }
    }
}
