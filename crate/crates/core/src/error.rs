use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("duplicate atom identifier `{0}`")]
    DuplicateAtom(String),
    #[error("invalid weight for atom `{atom}`: {reason}")]
    InvalidWeight { atom: String, reason: String },
    #[error("invalid exponent {0}: expected a finite p >= 1")]
    InvalidExponent(f64),
    #[error("exponent mismatch: {0} vs {1}")]
    ExponentMismatch(f64, f64),
    #[error("vector does not belong to the expected space: {0}")]
    SpaceMismatch(String),
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("vector is not on the positive unit sphere: {0}")]
    NotOnSphere(String),
    #[error("restricted sphere is empty: the set carries no positive finite atom")]
    EmptyRestrictedSphere,
    #[error("no minimizer: the restriction has zero norm")]
    NoMinimizer,
    #[error("absolute continuity violated at atom `{0}`")]
    AbsoluteContinuity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("oracle contract violated: {0}")]
    OracleContract(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}:{line}:{column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
