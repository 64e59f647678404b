use crate::polytope::GeometryError;
use crate::root::RootOfUnity;

/// Everything the engine can report. Input and precondition problems are kept
/// apart from internal-consistency failures, which indicate a bug.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("empty support after cancellation")]
    EmptySupport,
    #[error("empty-or-degenerate support in {0}")]
    DegenerateSupport(String),
    #[error("constant term in support; the origin must be a singular point")]
    ConstantTerm,
    #[error("at least two variables are required (got {0})")]
    TooFewVariables(usize),
    #[error("malformed support document: {0}")]
    Schema(String),
    #[error("dimension mismatch: point {index} has {found} entries, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("duplicate support point {0:?}")]
    DuplicatePoint(Vec<i64>),
    #[error("support is not convenient: no support on the {0}-axis")]
    NotConvenient(String),
    #[error("input too large: {0} (use --unsafe-large to override)")]
    TooLarge(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("face {face} is not prime")]
    NotPrime { face: usize },
    #[error("eigenvalue {0} is not allowed here")]
    BadEigenvalue(RootOfUnity),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error signals a broken invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_) | Error::Geometry(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
