//! Exact time evolution within a manifold, plus a fixed-step RK4 integrator
//! kept deliberately separate as a cross-check.
//!
//! With `H = V·diag(E)·Vᵀ`, the propagated state is
//! `ψ(t) = V·diag(e^{−iE_k t})·Vᵀ·ψ0`, exact for any horizon.

mod jacobi;
mod rk4;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{BasisState, Manifold};
use crate::matrix::SymMatrix;
use crate::state::StateVector;

pub use jacobi::{eigendecompose, MAX_SWEEPS, OFF_DIAGONAL_TOLERANCE};
pub use rk4::rk4_evolve;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    // row-major, column k is the eigenvector of values[k]
    vectors: Vec<f64>,
    sweeps: usize,
}

impl EigenDecomposition {
    pub(crate) fn from_parts(values: Vec<f64>, vectors: Vec<f64>, sweeps: usize) -> Self {
        EigenDecomposition { values, vectors, sweeps }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Component `row` of eigenvector `k`.
    #[inline]
    pub fn vector(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.dim() + k]
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// `E_max − E_min`.
    pub fn spectral_spread(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `max_k ‖H·v_k − E_k·v_k‖_∞`.
    pub fn max_residual(&self, h: &SymMatrix) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let col: Vec<f64> = (0..n).map(|r| self.vector(r, k)).collect();
            let hv = h.mul_vec(&col);
            for r in 0..n {
                worst = worst.max((hv[r] - self.values[k] * col[r]).abs());
            }
        }
        worst
    }

    /// Coefficients `Vᵀ·ψ` in the eigenbasis.
    pub fn project(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        psi.check_dim(self.dim())?;
        let n = self.dim();
        let amps = psi.amplitudes();
        Ok((0..n)
            .map(|k| {
                (0..n).fold(Complex64::new(0.0, 0.0), |acc, r| acc + amps[r] * self.vector(r, k))
            })
            .collect())
    }

    fn reconstruct(&self, coeffs: &[Complex64]) -> StateVector {
        let n = self.dim();
        StateVector::new(
            (0..n)
                .map(|r| {
                    (0..n).fold(Complex64::new(0.0, 0.0), |acc, k| acc + coeffs[k] * self.vector(r, k))
                })
                .collect(),
        )
    }
}

pub fn evolve(d: &EigenDecomposition, psi0: &StateVector, t: f64) -> Result<StateVector> {
    psi0.check_dim(d.dim())?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let mut coeffs = d.project(psi0)?;
    for (c, &e) in coeffs.iter_mut().zip(d.values()) {
        *c *= Complex64::from_polar(1.0, -e * t);
    }
    Ok(d.reconstruct(&coeffs))
}

/// Sampling step that resolves every beat frequency of the spectrum:
/// `π / (2·(E_max − E_min))`. `None` for a flat spectrum.
pub fn nyquist_dt(d: &EigenDecomposition) -> Option<f64> {
    let spread = d.spectral_spread();
    (spread > 0.0).then(|| PI / (2.0 * spread))
}

/// Uniform grid `0, dt, 2dt, …` up to and including `t_end`.
pub fn uniform_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    if times.last().is_some_and(|&t| t_end - t > 1e-12 * t_end.max(1.0)) {
        times.push(t_end);
    }
    times
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OccupationTrace {
    pub times: Vec<f64>,
    pub p_excited: Vec<f64>,
    pub n_mode1: Vec<f64>,
    pub n_mode2: Vec<f64>,
    /// `‖ψ(t)‖²` per sample.
    pub norm: Vec<f64>,
    /// Populations `|ψ_s(t)|²` of explicitly requested basis states.
    pub tracked: Vec<TrackedState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackedState {
    pub state: BasisState,
    pub population: Vec<f64>,
}

impl OccupationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|P_x + n1 + n2 − N|` over the samples.
    pub fn max_excitation_error(&self, n_total: usize) -> f64 {
        self.p_excited
            .iter()
            .zip(&self.n_mode1)
            .zip(&self.n_mode2)
            .map(|((p, a), b)| (p + a + b - n_total as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

struct SampleRow {
    p_excited: f64,
    n1: f64,
    n2: f64,
    norm: f64,
    tracked: Vec<f64>,
}

pub fn occupation_trace(
    d: &EigenDecomposition,
    m: &Manifold,
    psi0: &StateVector,
    times: &[f64],
    track: &[BasisState],
) -> Result<OccupationTrace> {
    if d.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: d.dim() });
    }
    psi0.check_dim(m.dim())?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("trace times must be sorted ascending".into()));
    }
    let tracked_idx = track.iter().map(|s| m.index_of(s)).collect::<Result<Vec<_>>>()?;
    let coeffs = d.project(psi0)?;

    let rows: Vec<SampleRow> = times
        .par_iter()
        .map(|&t| {
            let psi = if t == 0.0 {
                psi0.clone()
            } else {
                let phased: Vec<Complex64> = coeffs
                    .iter()
                    .zip(d.values())
                    .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
                    .collect();
                d.reconstruct(&phased)
            };
            let pops = psi.populations();
            let mut row = SampleRow { p_excited: 0.0, n1: 0.0, n2: 0.0, norm: 0.0, tracked: Vec::new() };
            for (p, s) in pops.iter().zip(m.states()) {
                if s.is_excited() {
                    row.p_excited += p;
                }
                row.n1 += p * s.n1 as f64;
                row.n2 += p * s.n2 as f64;
                row.norm += p;
            }
            row.tracked = tracked_idx.iter().map(|&i| pops[i]).collect();
            row
        })
        .collect();

    let mut trace = OccupationTrace {
        times: times.to_vec(),
        tracked: track
            .iter()
            .map(|s| TrackedState { state: *s, population: Vec::with_capacity(times.len()) })
            .collect(),
        ..Default::default()
    };
    for row in rows {
        trace.p_excited.push(row.p_excited);
        trace.n_mode1.push(row.n1);
        trace.n_mode2.push(row.n2);
        trace.norm.push(row.norm);
        for (tr, p) in trace.tracked.iter_mut().zip(row.tracked) {
            tr.population.push(p);
        }
    }
    Ok(trace)
}

/// Fast evaluator of the excited-state population `P_x(t)` for one initial
/// state, used by the maximum search in detuning scans.
///
/// Holds `a_sk = V_sk·c_k` for excited-level rows `s`, so that
/// `P_x(t) = Σ_s |Σ_k a_sk e^{−iE_k t}|²`. On a uniform grid the phases are
/// advanced by complex multiplication and re-anchored every
/// [`ExcitationProbe::REANCHOR`] steps.
#[derive(Debug, Clone)]
pub struct ExcitationProbe {
    energies: Vec<f64>,
    // coefficient c_k split into parts
    coeff_re: Vec<f64>,
    coeff_im: Vec<f64>,
    // excited rows of V, row-major [n_excited × dim]
    rows: Vec<f64>,
    n_excited: usize,
}

impl ExcitationProbe {
    pub const REANCHOR: usize = 4096;

    pub fn new(d: &EigenDecomposition, m: &Manifold, psi0: &StateVector) -> Result<Self> {
        if d.dim() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: d.dim() });
        }
        let coeffs = d.project(psi0)?;
        let dim = d.dim();
        let excited: Vec<usize> = m.excited_indices().collect();
        let mut rows = Vec::with_capacity(excited.len() * dim);
        for &s in &excited {
            rows.extend((0..dim).map(|k| d.vector(s, k)));
        }
        // shift by the lowest eigenvalue; only differences matter for |·|²
        let e0 = d.values().first().copied().unwrap_or(0.0);
        Ok(ExcitationProbe {
            energies: d.values().iter().map(|e| e - e0).collect(),
            coeff_re: coeffs.iter().map(|c| c.re).collect(),
            coeff_im: coeffs.iter().map(|c| c.im).collect(),
            rows,
            n_excited: excited.len(),
        })
    }

    fn population(&self, wr: &[f64], wi: &[f64]) -> f64 {
        let dim = self.energies.len();
        let mut total = 0.0;
        for s in 0..self.n_excited {
            let row = &self.rows[s * dim..(s + 1) * dim];
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..dim {
                re += row[k] * wr[k];
                im += row[k] * wi[k];
            }
            total += re * re + im * im;
        }
        total
    }

    fn anchor(&self, t: f64, wr: &mut [f64], wi: &mut [f64]) {
        for k in 0..self.energies.len() {
            let (s, c) = (-self.energies[k] * t).sin_cos();
            wr[k] = self.coeff_re[k] * c - self.coeff_im[k] * s;
            wi[k] = self.coeff_re[k] * s + self.coeff_im[k] * c;
        }
    }

    pub fn p_excited(&self, t: f64) -> f64 {
        let dim = self.energies.len();
        let mut wr = vec![0.0; dim];
        let mut wi = vec![0.0; dim];
        self.anchor(t, &mut wr, &mut wi);
        self.population(&wr, &wi)
    }

    /// Largest sample of `P_x` on `0, dt, 2dt, …, ≤ t_end`; returns `(value, time)`.
    pub fn max_on_grid(&self, t_end: f64, dt: f64) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, 0.0);
        self.for_each_sample(t_end, dt, |t, p| {
            if p > best.0 {
                best = (p, t);
            }
        });
        best
    }

    /// Calls `f(t, P_x(t))` for `t = 0, dt, 2dt, …, ≤ t_end` in order.
    pub fn for_each_sample(&self, t_end: f64, dt: f64, mut f: impl FnMut(f64, f64)) {
        let dim = self.energies.len();
        let steps = (t_end / dt).floor() as usize;
        let (rot_re, rot_im): (Vec<f64>, Vec<f64>) =
            self.energies.iter().map(|e| { let (s, c) = (-e * dt).sin_cos(); (c, s) }).unzip();
        let mut wr = vec![0.0; dim];
        let mut wi = vec![0.0; dim];
        let mut i = 0;
        while i <= steps {
            self.anchor(i as f64 * dt, &mut wr, &mut wi);
            let block_end = (i + Self::REANCHOR).min(steps + 1);
            for j in i..block_end {
                f(j as f64 * dt, self.population(&wr, &wi));
                for k in 0..dim {
                    let r = wr[k] * rot_re[k] - wi[k] * rot_im[k];
                    wi[k] = wr[k] * rot_im[k] + wi[k] * rot_re[k];
                    wr[k] = r;
                }
            }
            i = block_end;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, ModelParams};
    use crate::manifold::enumerate_manifold;
    use proptest::prelude::*;

    fn setup(n: usize, p: ModelParams, initial: BasisState) -> (Manifold, EigenDecomposition, StateVector) {
        let m = enumerate_manifold(n);
        let d = eigendecompose(&build_hamiltonian(&m, &p)).unwrap();
        let psi0 = StateVector::basis(m.dim(), m.index_of(&initial).unwrap());
        (m, d, psi0)
    }

    #[test]
    fn identity_at_zero() {
        let (_, d, psi0) = setup(2, ModelParams::symmetric(4.62, 10.0), BasisState::ground(2, 0));
        assert_eq!(evolve(&d, &psi0, 0.0).unwrap(), psi0);
    }

    #[test]
    fn vacuum_rabi_single_mode() {
        // Λ2 = 0 decouples mode 2
        let p = ModelParams { delta1: 0.0, delta2: 3.0, lambda1: 1.0, lambda2: 0.0 };
        let (m, d, psi0) = setup(1, p, BasisState::ground(1, 0));
        let x = m.index_of(&BasisState::excited(0, 0)).unwrap();
        for i in 0..200 {
            let t = i as f64 * 0.037;
            let psi = evolve(&d, &psi0, t).unwrap();
            let px = psi.amplitudes()[x].norm_sqr();
            assert!((px - t.sin().powi(2)).abs() < 1e-12, "t = {t}: {px}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        let (_, d, _) = setup(2, ModelParams::symmetric(1.0, 2.0), BasisState::ground(2, 0));
        assert!(matches!(
            evolve(&d, &StateVector::basis(3, 0), 1.0),
            Err(Error::DimensionMismatch { expected: 5, found: 3 })
        ));
    }

    #[test]
    fn vacuum_trace_is_zero() {
        let (m, d, psi0) = setup(0, ModelParams::symmetric(3.0, 7.0), BasisState::ground(0, 0));
        let times = uniform_times(10.0, 0.5);
        let tr = occupation_trace(&d, &m, &psi0, &times, &[]).unwrap();
        assert!(tr.p_excited.iter().chain(&tr.n_mode1).chain(&tr.n_mode2).all(|&v| v == 0.0));
    }

    #[test]
    fn trace_rejects_unsorted_times() {
        let (m, d, psi0) = setup(1, ModelParams::symmetric(3.0, 7.0), BasisState::ground(1, 0));
        assert!(occupation_trace(&d, &m, &psi0, &[1.0, 0.5], &[]).is_err());
    }

    #[test]
    fn trace_tracks_states() {
        let (m, d, psi0) = setup(2, ModelParams::symmetric(4.62, 10.0), BasisState::ground(2, 0));
        let track = [BasisState::ground(2, 0), BasisState::excited(0, 1)];
        let times = uniform_times(50.0, 0.1);
        let tr = occupation_trace(&d, &m, &psi0, &times, &track).unwrap();
        assert_eq!(tr.tracked[0].population[0], 1.0);
        assert_eq!(tr.tracked[1].population[0], 0.0);
        assert!(tr.max_excitation_error(2) < 1e-9);
        assert!(tr.max_norm_error() < 1e-10);
    }

    #[test]
    fn probe_matches_full_evolution() {
        let (m, d, psi0) = setup(3, ModelParams { delta1: 2.3, delta2: -5.1, lambda1: 0.7, lambda2: 1.4 }, BasisState::ground(2, 1));
        let probe = ExcitationProbe::new(&d, &m, &psi0).unwrap();
        for &t in &[0.0, 0.3, 7.0, 123.4, 9000.0] {
            let psi = evolve(&d, &psi0, t).unwrap();
            let px: f64 = m.excited_indices().map(|i| psi.amplitudes()[i].norm_sqr()).sum();
            assert!((probe.p_excited(t) - px).abs() < 1e-10, "t = {t}");
        }
        // recurrence over many re-anchor blocks agrees with direct sampling
        let dt = nyquist_dt(&d).unwrap();
        let (best, tb) = probe.max_on_grid(3000.0, dt);
        let direct = uniform_times(3000.0, dt)
            .into_iter()
            .map(|t| probe.p_excited(t))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - direct).abs() < 1e-10);
        assert!((probe.p_excited(tb) - best).abs() < 1e-10);
    }

    #[test]
    fn uniform_times_includes_end() {
        let t = uniform_times(1.0, 0.3);
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert_eq!(uniform_times(1.0, 0.25).len(), 5);
    }

    fn params() -> impl Strategy<Value = ModelParams> {
        (-15.0..15.0f64, -15.0..15.0f64, 0.5..2.0f64, 0.5..2.0f64)
            .prop_map(|(d1, d2, l1, l2)| ModelParams { delta1: d1, delta2: d2, lambda1: l1, lambda2: l2 })
    }

    proptest! {
        #[test]
        fn unitary_and_composable(n in 1usize..6, p in params(), k in 0usize..6, t1 in 0.0..200.0f64, t2 in 0.0..200.0f64) {
            let m = enumerate_manifold(n);
            let d = eigendecompose(&build_hamiltonian(&m, &p)).unwrap();
            let psi0 = StateVector::basis(m.dim(), k.min(n));
            let a = evolve(&d, &psi0, t1 + t2).unwrap();
            let b = evolve(&d, &evolve(&d, &psi0, t1).unwrap(), t2).unwrap();
            prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-9);
        }

        #[test]
        fn excitation_conserved(n in 1usize..6, p in params()) {
            let m = enumerate_manifold(n);
            let d = eigendecompose(&build_hamiltonian(&m, &p)).unwrap();
            let psi0 = StateVector::basis(m.dim(), 0);
            let tr = occupation_trace(&d, &m, &psi0, &uniform_times(100.0, 0.37), &[]).unwrap();
            prop_assert!(tr.max_excitation_error(n) < 1e-9);
            prop_assert!(tr.max_norm_error() < 1e-10);
            prop_assert!(tr.p_excited.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        }
    }
}
