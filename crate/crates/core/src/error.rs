use thiserror::Error;

/// Errors raised by the simulator when an input violates an operation's
/// precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("grid of {grid} points is too coarse for cutoff {cutoff}: need at least {required}")]
    GridTooCoarse {
        grid: usize,
        cutoff: usize,
        required: usize,
    },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("vector is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("density vanishes on every grid point")]
    DegenerateDensity,

    #[error("cost guard violated: {0}")]
    CostGuard(String),

    #[error("perturbation does not sum to zero (sum = {sum:.3e})")]
    EndpointConstraint { sum: f64 },

    #[error("charge must be non-zero to invert the phase relation")]
    ZeroCharge,

    #[error("regulator must be positive, got {0}")]
    Regulator(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
