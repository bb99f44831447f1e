use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("eigensolver did not reach the residual bound after {sweeps} sweeps (residual {residual:e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("{function}: eigenvalue(s) {offending:?} outside domain {domain}")]
    DomainViolation {
        function: String,
        domain: String,
        offending: Vec<f64>,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not unital: deviation from identity {deviation:e}")]
    NotUnital { deviation: f64 },

    #[error("not an isometry: ||C*C - I|| = {deviation:e}")]
    NotIsometry { deviation: f64 },

    #[error("projection family is not a resolution of the identity: {reason}")]
    NotAResolution { reason: String },

    #[error("map weights are not normalized: {reason}")]
    NotNormalized { reason: String },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("{function} has no derivative rule for the support-line constant")]
    MissingDerivative { function: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("map is not positive: minimum eigenvalue {lambda_min:e} on a positive input")]
    NotPositive { lambda_min: f64 },

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("internal consistency check failed: {0}")]
    VerificationFailed(String),

    #[error("regression fixture `{fixture}` failed: {reason}")]
    RegressionFailure { fixture: String, reason: String },

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("unknown inequality id `{0}`")]
    UnknownInequality(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
