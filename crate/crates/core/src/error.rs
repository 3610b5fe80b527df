use thiserror::Error;

use crate::manifold::BasisState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state {state} has excitation {found}, manifold has {expected}")]
    StateNotInManifold {
        state: BasisState,
        found: usize,
        expected: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state vector not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid photon number: {0}")]
    InvalidPhotonNumber(String),

    #[error("{n1} photons in mode 1 cannot support a {order}-photon process")]
    InsufficientPhotons { n1: usize, order: usize },

    #[error("singular denominator: {0}")]
    SingularDenominator(&'static str),

    #[error("scan point (delta1 = {delta1}, delta2 = {delta2}): {source}")]
    ScanPoint {
        delta1: f64,
        delta2: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::SingularDenominator(_) => true,
            Error::ScanPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
