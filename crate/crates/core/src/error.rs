use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("grid too small: N = {nodes} (need N >= {min})")]
    GridTooSmall { nodes: usize, min: usize },

    #[error("class is not pseudo-effective: class mass {mass:.6e} < 0")]
    NotPseudoEffective { mass: f64 },

    #[error("klt violation: log coefficient {coeff} makes the weight non-integrable (need c < 1)")]
    KltViolation { coeff: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{method} did not converge after {iterations} sweeps (last update {residual:.3e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
