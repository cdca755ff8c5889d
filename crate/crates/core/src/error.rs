use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {name} = {value} is outside the function domain")]
    Domain { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("symbol with modulus {modulus} is not on the unit circle")]
    NonUnitSymbol { modulus: f64 },

    #[error("unsupported modulation order {0}")]
    UnsupportedOrder(usize),

    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("quadrature did not converge: relative change {relative_change:e} after order doubling")]
    QuadratureNonConvergence { relative_change: f64 },

    #[error("characteristic function has no pole with positive real part")]
    DegeneratePoles,

    #[error("exhaustive search space of {0} candidates exceeds the 2^20 limit")]
    SearchSpaceOverflow(u128),
}

pub type Result<T> = core::result::Result<T, Error>;
