use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, ModelParams};
use crate::manifold::{BasisState, Manifold};
use crate::matrix::SymMatrix;
use crate::propagator::eigendecompose;

/// Ratio `max Λ_i√n_i / |Δ1 − Δ2|` above which the elimination is flagged.
pub const VALIDITY_LIMIT: f64 = 0.3;

/// Few-state truncation of one manifold around a two-photon scattering chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHamiltonian {
    pub states: Vec<BasisState>,
    pub matrix: SymMatrix,
}

/// Chain states for `|g,n1,n2⟩ → |x,n1−2,n2+1⟩`, in the order
/// `|x,n1,n2−1⟩, |x,n1−1,n2⟩, |g,n1,n2⟩, |x,n1−2,n2+1⟩, |g,n1−1,n2+1⟩, |g,n1−2,n2+2⟩`.
/// `|x,n1,n2−1⟩` does not exist for `n2 = 0` and is left out.
pub fn reduced_states(n1: usize, n2: usize) -> Result<Vec<BasisState>> {
    if n1 < 2 {
        return Err(Error::InvalidPhotonNumber(format!("the reduced chain needs n1 ≥ 2, got {n1}")));
    }
    let mut states = Vec::with_capacity(6);
    if n2 > 0 {
        states.push(BasisState::excited(n1, n2 - 1));
    }
    states.extend([
        BasisState::excited(n1 - 1, n2),
        BasisState::ground(n1, n2),
        BasisState::excited(n1 - 2, n2 + 1),
        BasisState::ground(n1 - 1, n2 + 1),
        BasisState::ground(n1 - 2, n2 + 2),
    ]);
    Ok(states)
}

/// Six-state Hamiltonian of the two-photon chain with the initial state at
/// zero energy and detunings measured from it:
///
/// ```text
/// diag = (Δ2, Δ1, 0, 2Δ1−Δ2, Δ1−Δ2, 2Δ1−2Δ2)
/// ```
///
/// with couplings `Λ2√n2 (1,3)`, `Λ1√n1 (2,3)`, `Λ2√(n2+1) (2,5)`,
/// `Λ1√(n1−1) (4,5)`, `Λ2√(n2+2) (4,6)`. For `n2 = 0` the first row and column
/// are removed. Relative to the rotating-frame operator restricted to the same
/// states this is `−S(H − E_i)S`, `S` flipping the sign of excited states.
pub fn reduced_hamiltonian6(n1: usize, n2: usize, p: &ModelParams) -> Result<ReducedHamiltonian> {
    let states = reduced_states(n1, n2)?;
    let (d1, d2, l1, l2) = (p.delta1, p.delta2, p.lambda1, p.lambda2);
    let (f1, f2) = (n1 as f64, n2 as f64);
    let diag = [d2, d1, 0.0, 2.0 * d1 - d2, d1 - d2, 2.0 * d1 - 2.0 * d2];
    let couplings = [
        (0, 2, l2 * f2.sqrt()),
        (1, 2, l1 * f1.sqrt()),
        (1, 4, l2 * (f2 + 1.0).sqrt()),
        (3, 4, l1 * (f1 - 1.0).sqrt()),
        (3, 5, l2 * (f2 + 2.0).sqrt()),
    ];
    let skip = usize::from(n2 == 0);
    let mut h = SymMatrix::zeros(6 - skip);
    for (i, &v) in diag.iter().enumerate().skip(skip) {
        h.set(i - skip, i - skip, v);
    }
    for &(i, j, v) in couplings.iter().filter(|c| c.0 >= skip) {
        h.set(i - skip, j - skip, v);
    }
    Ok(ReducedHamiltonian { states, matrix: h })
}

/// Effective two-level description of `|g,n1,n2⟩ ↔ |x,n1−2,n2+1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTwoLevel {
    pub e1: f64,
    pub e2: f64,
    pub omega_eff: f64,
    pub predicted_delta2: f64,
    pub validity_ratio: f64,
    /// `validity_ratio > VALIDITY_LIMIT`.
    pub outside_validity: bool,
}

impl EffectiveTwoLevel {
    pub fn detuning(&self) -> f64 {
        self.e2 - self.e1
    }

    pub fn generalized_rabi(&self) -> f64 {
        self.detuning().hypot(self.omega_eff)
    }

    /// Population oscillation period `2π/√((E2−E1)² + Ω²)`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.generalized_rabi()
    }

    /// Occupation of `|f⟩` at time `t` starting in `|i⟩`.
    pub fn p_final(&self, t: f64) -> f64 {
        let w = self.generalized_rabi();
        if w == 0.0 {
            return 0.0;
        }
        (self.omega_eff / w).powi(2) * (0.5 * w * t).sin().powi(2)
    }
}

pub fn adiabatic_elimination(n1: usize, n2: usize, p: &ModelParams) -> Result<EffectiveTwoLevel> {
    if n1 < 2 {
        return Err(Error::InvalidPhotonNumber(format!("adiabatic elimination needs n1 ≥ 2, got {n1}")));
    }
    let (d1, d2, l1, l2) = (p.delta1, p.delta2, p.lambda1, p.lambda2);
    if d1 == 0.0 {
        return Err(Error::SingularDenominator("Δ1 = 0"));
    }
    if d2 == 0.0 {
        return Err(Error::SingularDenominator("Δ2 = 0"));
    }
    if d1 == d2 {
        return Err(Error::SingularDenominator("Δ1 = Δ2"));
    }
    let (f1, f2) = (n1 as f64, n2 as f64);
    let omega_eff = 2.0 * l1 * l1 * l2 * ((f1 - 1.0) * f1 * (f2 + 1.0)).sqrt() / (d1 * (d1 - d2));
    let e1 = -l2 * l2 * f2 / d2 - l1 * l1 * f1 / d1;
    let e2 = 2.0 * d1 - d2 + l1 * l1 * (f1 - 1.0) / (d2 - d1) + l2 * l2 * (f2 + 2.0) / (2.0 * (d2 - d1));
    let validity_ratio = (l1 * f1.sqrt()).max(l2 * f2.sqrt()) / (d1 - d2).abs();
    Ok(EffectiveTwoLevel {
        e1,
        e2,
        omega_eff,
        predicted_delta2: resonance_predict_appendix(n1, n2, p, d1)?,
        validity_ratio,
        outside_validity: validity_ratio > VALIDITY_LIMIT,
    })
}

/// Two-photon resonance `Δ2 = 2Δ1 + Λ1²(2n1−1)/Δ1 + Λ2²(n2+1)/Δ1`.
/// Only the couplings of `p` are used.
pub fn resonance_predict_appendix(n1: usize, n2: usize, p: &ModelParams, delta1: f64) -> Result<f64> {
    if delta1 == 0.0 {
        return Err(Error::SingularDenominator("Δ1 = 0"));
    }
    Ok(2.0 * delta1 + stark_sum(n1, n2, p) / delta1)
}

/// Inverse of [`resonance_predict_appendix`]: the `Δ1` on the two-photon line
/// for a given `Δ2`, taking the root of `2Δ1² − Δ2Δ1 + A = 0` nearest `Δ2/2`.
pub fn two_photon_resonance_delta1(n1: usize, n2: usize, p: &ModelParams, delta2: f64) -> Result<f64> {
    let a = stark_sum(n1, n2, p);
    let disc = delta2 * delta2 - 8.0 * a;
    if disc < 0.0 {
        return Err(Error::InvalidParameter(format!("no two-photon resonance for Δ2 = {delta2}: |Δ2| < √(8A)")));
    }
    Ok((delta2 + delta2.signum() * disc.sqrt()) / 4.0)
}

fn stark_sum(n1: usize, n2: usize, p: &ModelParams) -> f64 {
    p.lambda1 * p.lambda1 * (2.0 * n1 as f64 - 1.0) + p.lambda2 * p.lambda2 * (n2 as f64 + 1.0)
}

/// `|g,n1,n2⟩ → |x, n1−N, n2+N−1⟩`.
pub fn n_photon_final_state(initial: &BasisState, order_n: usize) -> Result<BasisState> {
    if initial.is_excited() {
        return Err(Error::InvalidParameter(format!("initial state {initial} must be ground-level")));
    }
    if order_n < 2 {
        return Err(Error::InvalidParameter(format!("scattering order must be ≥ 2, got {order_n}")));
    }
    if initial.n1 < order_n {
        return Err(Error::InsufficientPhotons { n1: initial.n1, order: order_n });
    }
    Ok(BasisState::excited(initial.n1 - order_n, initial.n2 + order_n - 1))
}

/// Coarse locator `|Δ1| − Ω` of the broad opposite-sign detuning region.
pub fn dichromatic_predict(delta1: f64, omega_rabi: f64) -> f64 {
    delta1.abs() - omega_rabi
}

/// Predicted `Δ1` of the `N`-photon line `|g,n1,n2⟩ ↔ |x,n1−N,n2+N−1⟩` for a given `Δ2`.
///
/// Bare energy balance `NΔ1 = (N−1)Δ2` corrected by the second-order Stark
/// shifts of both end states, with mode-2 denominators rewritten through
/// `Δ2 ≈ NΔ1/(N−1)`:
/// `NΔ1² − (N−1)Δ2Δ1 + Λ1²(2n1−N+1) + Λ2²(2n2+N)(N−1)/N = 0`.
/// For `N = 2` this is exactly [`two_photon_resonance_delta1`]. Returns the root
/// on the side of the bare line `(N−1)Δ2/N`, or the parabola vertex when the
/// roots are complex. Heuristic beyond `N = 2`.
pub fn n_photon_resonance_delta1(initial: &BasisState, order_n: usize, p: &ModelParams, delta2: f64) -> Result<f64> {
    n_photon_final_state(initial, order_n)?;
    let n = order_n as f64;
    let (f1, f2) = (initial.n1 as f64, initial.n2 as f64);
    let b = (n - 1.0) * delta2;
    let c = p.lambda1 * p.lambda1 * (2.0 * f1 - n + 1.0) + p.lambda2 * p.lambda2 * (2.0 * f2 + n) * (n - 1.0) / n;
    let disc = b * b - 4.0 * n * c;
    if disc < 0.0 {
        return Ok(b / (2.0 * n));
    }
    Ok((b + delta2.signum() * disc.sqrt()) / (2.0 * n))
}

/// Period of the slow population exchange in the full model: `2π/|E_a − E_b|`
/// for the two eigenstates carrying the most weight of `initial`.
pub fn slow_oscillation_period(p: &ModelParams, initial: &BasisState) -> Result<f64> {
    let m = Manifold::containing(initial);
    let d = eigendecompose(&build_hamiltonian(&m, p))?;
    let i0 = m.index_of(initial)?;
    let mut weights: Vec<(f64, f64)> = (0..d.dim()).map(|k| (d.vector(i0, k).powi(2), d.values()[k])).collect();
    if weights.len() < 2 {
        return Err(Error::InvalidParameter(format!("{initial} has no partner state")));
    }
    weights.sort_by(|a, b| b.0.total_cmp(&a.0));
    let gap = (weights[0].1 - weights[1].1).abs();
    if gap == 0.0 {
        return Err(Error::SingularDenominator("degenerate dressed states"));
    }
    Ok(2.0 * std::f64::consts::PI / gap)
}
