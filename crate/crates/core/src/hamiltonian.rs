//! Rotating-frame Hamiltonian `H − ω0·N` of the two-mode Jaynes-Cummings model.
//!
//! Within a manifold `ω0·N` is a constant, so removing it leaves matrix
//! elements that depend only on the detunings `Δi = ωi − ω0` and the couplings
//! `Λi`. All quantities are in units of a reference coupling (ħ = 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{BasisState, Manifold};
use crate::matrix::SymMatrix;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta1: f64,
    pub delta2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ModelParams {
    pub fn new(delta1: f64, delta2: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let p = ModelParams { delta1, delta2, lambda1, lambda2 };
        p.validate()?;
        Ok(p)
    }

    /// Equal couplings `Λ1 = Λ2 = 1`.
    pub fn symmetric(delta1: f64, delta2: f64) -> Self {
        ModelParams { delta1, delta2, lambda1: 1.0, lambda2: 1.0 }
    }

    pub fn with_detunings(self, delta1: f64, delta2: f64) -> Self {
        ModelParams { delta1, delta2, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta1.is_finite() && self.delta2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "detunings must be finite, got ({}, {})",
                self.delta1, self.delta2
            )));
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Diagonal energy of a basis state in the `H − ω0·N` frame.
pub fn bare_energy(s: &BasisState, p: &ModelParams) -> f64 {
    s.n1 as f64 * p.delta1 + s.n2 as f64 * p.delta2
}

pub fn build_hamiltonian(m: &Manifold, p: &ModelParams) -> SymMatrix {
    let mut h = SymMatrix::zeros(m.dim());
    for (i, s) in m.states().iter().enumerate() {
        h.set(i, i, bare_energy(s, p));
        if s.is_excited() {
            continue;
        }
        // |g,n1,n2⟩ ↔ |x,n1−1,n2⟩ and |g,n1,n2⟩ ↔ |x,n1,n2−1⟩
        if s.n1 > 0 {
            let j = m.index_of(&BasisState::excited(s.n1 - 1, s.n2)).expect("same manifold");
            h.set(i, j, p.lambda1 * (s.n1 as f64).sqrt());
        }
        if s.n2 > 0 {
            let j = m.index_of(&BasisState::excited(s.n1, s.n2 - 1)).expect("same manifold");
            h.set(i, j, p.lambda2 * (s.n2 as f64).sqrt());
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormPolicy {
    /// Reject vectors whose norm differs from one by more than 1e-9.
    #[default]
    Strict,
    Renormalize,
}

pub const NORM_TOLERANCE: f64 = 1e-9;

/// `⟨N⟩ = Σ_s |ψ_s|² · excitation(s)`.
pub fn expectation_excitation(m: &Manifold, psi: &StateVector, policy: NormPolicy) -> Result<f64> {
    psi.check_dim(m.dim())?;
    let norm_sqr = psi.norm_sqr();
    let scale = match policy {
        NormPolicy::Strict if (norm_sqr - 1.0).abs() > NORM_TOLERANCE => {
            return Err(Error::NotNormalized { norm_sqr });
        }
        NormPolicy::Strict => 1.0,
        NormPolicy::Renormalize if norm_sqr == 0.0 => return Err(Error::NotNormalized { norm_sqr }),
        NormPolicy::Renormalize => 1.0 / norm_sqr,
    };
    Ok(psi
        .amplitudes()
        .iter()
        .zip(m.states())
        .map(|(a, s)| a.norm_sqr() * s.excitation() as f64)
        .sum::<f64>()
        * scale)
}
