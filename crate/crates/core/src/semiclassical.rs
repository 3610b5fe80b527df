//! Two-level emitter under one or two classical fields.
//!
//! Integrated in the frame rotating at the transition frequency, where each
//! drive enters the off-diagonal element as `−½·Ω_i(t)·e^{−iΔ_i t}`. Time is
//! in units of the inverse reference Rabi frequency.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Envelope {
    /// `Ω·θ(t − t_on)`.
    CwStep { t_on: f64 },
    /// `Ω·exp(−(t − t_center)² / (2σ²))` with `σ = duration`.
    Gaussian { t_center: f64, duration: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    pub envelope: Envelope,
    pub amplitude: f64,
    pub detuning: f64,
}

impl DriveField {
    /// Constant drive switched on at `t = 0`.
    pub fn cw(amplitude: f64, detuning: f64) -> Self {
        DriveField { envelope: Envelope::CwStep { t_on: 0.0 }, amplitude, detuning }
    }

    pub fn gaussian(amplitude: f64, detuning: f64, t_center: f64, duration: f64) -> Self {
        DriveField { envelope: Envelope::Gaussian { t_center, duration }, amplitude, detuning }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::InvalidParameter(format!("drive amplitude must be positive, got {}", self.amplitude)));
        }
        if !self.detuning.is_finite() {
            return Err(Error::InvalidParameter("drive detuning must be finite".into()));
        }
        match self.envelope {
            Envelope::Gaussian { duration, t_center } if !(duration > 0.0 && duration.is_finite() && t_center.is_finite()) => {
                Err(Error::InvalidParameter(format!("gaussian duration must be positive, got {duration}")))
            }
            Envelope::CwStep { t_on } if !t_on.is_finite() => Err(Error::InvalidParameter("t_on must be finite".into())),
            _ => Ok(()),
        }
    }

    pub fn envelope_at(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::CwStep { t_on } => {
                if t >= t_on {
                    self.amplitude
                } else {
                    0.0
                }
            }
            Envelope::Gaussian { t_center, duration } => {
                let x = (t - t_center) / duration;
                self.amplitude * (-0.5 * x * x).exp()
            }
        }
    }

    /// `Ω_i(t)·e^{−iΔ_i t}`.
    fn coupling_at(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.envelope_at(t), -self.detuning * t)
    }
}

/// Fastest rate among the drives, `max_i(Ω_i, |Δ_i|)`.
fn fastest_rate(drives: &[DriveField]) -> f64 {
    drives.iter().map(|d| d.amplitude.max(d.detuning.abs())).fold(0.0, f64::max)
}

/// `0.01 / max_i(Ω_i, |Δ_i|)`.
pub fn default_dt(drives: &[DriveField]) -> f64 {
    0.01 / fastest_rate(drives)
}

/// Steps larger than `0.05 / max_i(Ω_i, |Δ_i|)` void the accuracy contract.
pub fn max_accurate_dt(drives: &[DriveField]) -> f64 {
    0.05 / fastest_rate(drives)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TwoLevelTrace {
    pub times: Vec<f64>,
    pub p_excited: Vec<f64>,
    pub norm: Vec<f64>,
    /// Set when `dt` exceeded [`max_accurate_dt`].
    pub step_too_large: bool,
}

impl TwoLevelTrace {
    /// `(max P_x, time of max)`.
    pub fn max_excited(&self) -> (f64, f64) {
        self.p_excited
            .iter()
            .zip(&self.times)
            .fold((f64::NEG_INFINITY, 0.0), |best, (&p, &t)| if p > best.0 { (p, t) } else { best })
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Strict interior local maxima of `P_x` before the global maximum.
    pub fn local_maxima_before_peak(&self) -> usize {
        let peak = self
            .p_excited
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (1..peak)
            .filter(|&i| self.p_excited[i] > self.p_excited[i - 1] && self.p_excited[i] >= self.p_excited[i + 1])
            .count()
    }
}

/// Starts in `|g⟩` at `t = 0` and records `P_x` after every step.
pub fn simulate_two_level(drives: &[DriveField], t_end: f64, dt: f64) -> Result<TwoLevelTrace> {
    if drives.is_empty() || drives.len() > 2 {
        return Err(Error::InvalidParameter(format!("expected one or two drives, got {}", drives.len())));
    }
    for d in drives {
        d.validate()?;
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }

    let steps = (t_end / dt).round() as usize;
    let step = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let mut trace = TwoLevelTrace {
        times: Vec::with_capacity(steps + 1),
        p_excited: Vec::with_capacity(steps + 1),
        norm: Vec::with_capacity(steps + 1),
        step_too_large: dt > max_accurate_dt(drives),
    };

    let field = |t: f64| -> Complex64 { drives.iter().map(|d| d.coupling_at(t)).sum() };
    // (ċg, ċx) = −i·H·(cg, cx) with H = [[0, −½W*], [−½W, 0]]
    let rhs = |t: f64, cg: Complex64, cx: Complex64| -> (Complex64, Complex64) {
        let w = field(t);
        let half_i = Complex64::new(0.0, 0.5);
        (half_i * w.conj() * cx, half_i * w * cg)
    };

    let mut cg = Complex64::new(1.0, 0.0);
    let mut cx = Complex64::new(0.0, 0.0);
    trace.times.push(0.0);
    trace.p_excited.push(0.0);
    trace.norm.push(1.0);
    for s in 0..steps {
        let t = s as f64 * step;
        let h = step;
        let (k1g, k1x) = rhs(t, cg, cx);
        let (k2g, k2x) = rhs(t + 0.5 * h, cg + k1g * (0.5 * h), cx + k1x * (0.5 * h));
        let (k3g, k3x) = rhs(t + 0.5 * h, cg + k2g * (0.5 * h), cx + k2x * (0.5 * h));
        let (k4g, k4x) = rhs(t + h, cg + k3g * h, cx + k3x * h);
        cg += (k1g + k2g * 2.0 + k3g * 2.0 + k4g) * (h / 6.0);
        cx += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        trace.times.push((s + 1) as f64 * step);
        trace.p_excited.push(cx.norm_sqr());
        trace.norm.push(cg.norm_sqr() + cx.norm_sqr());
    }
    Ok(trace)
}

/// Detuned Rabi formula `Ω²/(Ω² + Δ²)·sin²(√(Ω² + Δ²)·t/2)`.
pub fn rabi_analytic(omega: f64, delta: f64, t: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let gen2 = omega * omega + delta * delta;
    Ok(omega * omega / gen2 * (0.5 * gen2.sqrt() * t).sin().powi(2))
}

/// Two-colour resonance for pulsed excitation: `Δ2 = Δ1 + √(Δ1² + Ω1_max²)`.
pub fn super_resonance_pulsed(delta1: f64, omega1_max: f64) -> Result<f64> {
    if !(omega1_max > 0.0 && omega1_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega1_max must be positive, got {omega1_max}")));
    }
    Ok(delta1 + delta1.hypot(omega1_max))
}

/// Two-colour resonance for equal constant amplitudes: the magnitude of `Δ2`
/// solving `√(Ω0² + Δ2²) = 2·√(Ω0² + Δ1²)`. Both detunings share a sign, which
/// the caller applies.
pub fn super_resonance_cw(omega0: f64, delta1: f64) -> Result<f64> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega0 must be positive, got {omega0}")));
    }
    Ok((4.0 * (omega0 * omega0 + delta1 * delta1) - omega0 * omega0).sqrt())
}

/// Generalised Rabi frequency `√(Ω² + Δ²)`.
pub fn generalized_rabi(omega: f64, delta: f64) -> f64 {
    omega.hypot(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn resonant_full_flip() {
        let d = [DriveField::cw(1.0, 0.0)];
        let tr = simulate_two_level(&d, PI, default_dt(&d)).unwrap();
        assert!((tr.p_excited.last().unwrap() - 1.0).abs() < 1e-9);
        assert!((rabi_analytic(1.0, 0.0, PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((rabi_analytic(2.5, 0.0, PI / 2.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detuned_envelope() {
        // Δ = Ω halves the envelope; the maximum sits at √2·t = π
        let t_peak = PI / 2f64.sqrt();
        assert!((rabi_analytic(1.0, 1.0, t_peak).unwrap() - 0.5).abs() < 1e-15);
        let d = [DriveField::cw(1.0, 3.0)];
        let (max, _) = simulate_two_level(&d, 10.0, default_dt(&d)).unwrap().max_excited();
        assert!(max < 1.0 / (1.0 + 9.0) + 1e-6);
        assert!(max > 1.0 / (1.0 + 9.0) - 1e-3);
    }

    #[test]
    fn simulation_matches_analytic() {
        let d = [DriveField::cw(1.0, 2.0)];
        let tr = simulate_two_level(&d, 20.0 * PI, default_dt(&d)).unwrap();
        for (&t, &p) in tr.times.iter().zip(&tr.p_excited) {
            assert!((p - rabi_analytic(1.0, 2.0, t).unwrap()).abs() < 1e-6);
        }
        assert!(tr.max_norm_error() < 1e-8);
        assert!(!tr.step_too_large);
    }

    #[test]
    fn delayed_switch_on() {
        let d = [DriveField { envelope: Envelope::CwStep { t_on: 2.0 }, amplitude: 1.0, detuning: 0.0 }];
        let tr = simulate_two_level(&d, 2.0 + PI, 1e-3).unwrap();
        let before = tr.times.iter().position(|&t| t >= 1.99).unwrap();
        assert_eq!(tr.p_excited[before], 0.0);
        assert!((tr.p_excited.last().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_pi_pulse() {
        // area ∫Ω dt = Ω·σ·√(2π) = π inverts on resonance
        let sigma = 3.0;
        let omega = PI / (sigma * (2.0 * PI).sqrt());
        let d = [DriveField::gaussian(omega, 0.0, 8.0 * sigma, sigma)];
        let tr = simulate_two_level(&d, 16.0 * sigma, 1e-3).unwrap();
        assert!((tr.p_excited.last().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn step_warning() {
        let d = [DriveField::cw(1.0, 4.0)];
        assert!(simulate_two_level(&d, 1.0, 0.02).unwrap().step_too_large);
        assert!(!simulate_two_level(&d, 1.0, 0.01).unwrap().step_too_large);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(simulate_two_level(&[], 1.0, 0.01).is_err());
        let d = DriveField::cw(1.0, 0.0);
        assert!(simulate_two_level(&[d, d, d], 1.0, 0.01).is_err());
        assert!(simulate_two_level(&[DriveField::cw(0.0, 0.0)], 1.0, 0.01).is_err());
        assert!(simulate_two_level(&[DriveField::gaussian(1.0, 0.0, 0.0, 0.0)], 1.0, 0.01).is_err());
        assert!(simulate_two_level(&[d], 1.0, 0.0).is_err());
        assert!(rabi_analytic(0.0, 1.0, 1.0).is_err());
        assert!(super_resonance_cw(-1.0, 1.0).is_err());
        assert!(super_resonance_pulsed(1.0, 0.0).is_err());
    }

    #[test]
    fn resonance_conditions() {
        assert_eq!(super_resonance_pulsed(0.0, 1.0).unwrap(), 1.0);
        assert!((super_resonance_pulsed(2.0, 1.0).unwrap() - (2.0 + 5f64.sqrt())).abs() < 1e-15);
        // large-detuning limit → 2Δ1; exact value is 100 + √10001
        let far = super_resonance_pulsed(100.0, 1.0).unwrap();
        assert!((far - (100.0 + 10001f64.sqrt())).abs() < 1e-12);
        assert!((far / 200.0 - 1.0).abs() < 3e-5);
        assert!((super_resonance_cw(1.0, 0.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let d2 = super_resonance_cw(1.0, 2.0).unwrap();
        assert!((d2 - 19f64.sqrt()).abs() < 1e-15);
        assert!((d2 - 4.36).abs() < 5e-3);
    }

    #[test]
    fn cw_resonance_doubles_rabi_frequency() {
        for &(o, d1) in &[(1.0, 0.0), (1.0, 2.0), (0.3, -7.5), (4.0, 0.25), (2.0, 30.0)] {
            let d2 = super_resonance_cw(o, d1).unwrap();
            let ratio = generalized_rabi(o, d2) / generalized_rabi(o, d1);
            assert!((ratio - 2.0).abs() < 1e-12, "{o} {d1}: {ratio}");
        }
    }
}
