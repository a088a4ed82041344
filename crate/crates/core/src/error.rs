use thiserror::Error;

use crate::models::ModelError;
use crate::ode::OdeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("wavenumber k = {k} is below the supported minimum {k_min}")]
    KTooSmall { k: f64, k_min: f64 },
    #[error("degenerate matching denominator at k = {k}")]
    DegenerateDenominator { k: f64 },
    #[error("operation requires {expected} geometry")]
    GeometryMismatch { expected: &'static str },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("every sweep point failed; first failure: {0}")]
    AllPointsFailed(Box<Error>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
