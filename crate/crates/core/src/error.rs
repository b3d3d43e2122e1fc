use alloc::string::String;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation undefined for the zero vector")]
    ZeroVector,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("atom {index} has norm {norm} > 1")]
    NormExceeded { index: usize, norm: f64 },

    #[error("column {index} of the matrix is zero")]
    ZeroColumn { index: usize },

    #[error("inner solver did not converge after {iterations} iterations (stationarity {stationarity:e})")]
    InnerSolver { iterations: usize, stationarity: f64 },

    #[error("enumeration needs {required} evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("fit window holds {points} positive points, at least {required} required")]
    WindowTooSmall { points: usize, required: usize },

    #[error("vector lies outside the span of the atoms (least-squares residual {residual:e})")]
    OutsideSpan { residual: f64 },

    #[error("gradient undefined at the kink of the energy")]
    Kink,

    #[error("expansion did not converge within {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
