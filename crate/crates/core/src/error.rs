use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    BadDimension(usize),
    #[error("operator is not elliptic: ellipticity constant {0:e} <= 0")]
    NonElliptic(f64),
    #[error("second-order coefficient {0} has a nonzero imaginary part")]
    ComplexPrincipalPart(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("evaluation at the origin")]
    OriginEvaluation,
    #[error("unsupported operator kind: {0}")]
    UnsupportedKind(String),
    #[error("bad shape parameter {name}: {reason}")]
    BadShapeParameters { name: String, reason: String },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,
    #[error("quadrature did not converge: change {change:e} exceeds {tol:e}")]
    QuadratureNotConverged { change: f64, tol: f64 },
    #[error("kernel evaluation failed: {0}")]
    KernelEvaluationFailure(String),
    #[error("field is not positively homogeneous of degree -{degree}: residual {residual:e}")]
    NotHomogeneous { degree: f64, residual: f64 },
    #[error("theta must lie in (0, 1], got {0}")]
    BadTheta(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("curve {0} not found in report")]
    MissingCurve(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
