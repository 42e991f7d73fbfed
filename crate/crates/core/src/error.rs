use thiserror::Error;

/// Errors raised by the geometric kernel and everything built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("lower-dimensional body (affine dimension {found} in R^{dim})")]
    LowerDimensional { dim: usize, found: usize },
    #[error("unbounded polyhedron")]
    Unbounded,
    #[error("infeasible constraint system")]
    Infeasible,
    #[error("dependent normals")]
    DependentNormals,
    #[error("empty complement")]
    EmptyComplement,
    #[error("polar unbounded: origin is not an interior point")]
    PolarUnbounded,
    #[error("zero direction")]
    ZeroDirection,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tolerance mismatch: {0} vs {1}")]
    ToleranceMismatch(f64, f64),
    #[error("invalid coordinate subset {indices:?} for dimension {n}")]
    InvalidSubset { n: usize, indices: Vec<usize> },
    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("invalid norm exponent p = {0} (need p >= 1)")]
    InvalidNorm(f64),
    #[error("eta hypothesis fails: rho = {rho}, (1 - eta) * radius = {bound}")]
    EtaHypothesis { rho: f64, bound: f64 },
    #[error("eta = {0} outside [0, 1)")]
    EtaOutOfRange(f64),
    #[error("body is not contained in the hyperplane orthogonal to e")]
    NotInHyperplane,
    #[error("operation requires a symmetric body")]
    NotSymmetric,
    #[error("operation requires exact arithmetic")]
    ExactRequired,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("could not generate a full-dimensional body after {0} attempts")]
    GenerationFailed(usize),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid field `{field}`: {msg}")]
    Format { field: String, msg: String },
}

impl Error {
    /// A malformed-input error naming the offending field.
    pub fn format(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
