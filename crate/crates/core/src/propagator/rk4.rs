use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::state::StateVector;

/// Fixed-step classical RK4 for `i dψ/dt = Hψ`.
///
/// `H` is split into its diagonal `D` and off-diagonal part `W`; the
/// integration runs on `φ = e^{iDt}ψ`, which obeys
/// `i dφ/dt = e^{iDt} W e^{−iDt} φ`, and `ψ(t_end) = e^{−iD t_end} φ` is
/// restored analytically. The integrand then only oscillates at the
/// detunings rather than at the absolute manifold energies. The step is
/// `t_end / round(t_end / dt)` so the horizon is hit exactly. No
/// renormalization is applied.
pub fn rk4_evolve(h: &SymMatrix, psi0: &StateVector, t_end: f64, dt: f64) -> Result<StateVector> {
    let n = h.dim();
    psi0.check_dim(n)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    if t_end == 0.0 {
        return Ok(psi0.clone());
    }

    let diag = h.diagonal();
    let mut offdiag = h.clone();
    for i in 0..n {
        offdiag.set(i, i, 0.0);
    }
    let steps = ((t_end / dt).round() as usize).max(1);
    let step = t_end / steps as f64;

    let zero = Complex64::new(0.0, 0.0);
    let mut phi: Vec<Complex64> = psi0.amplitudes().to_vec();
    let mut scratch = vec![zero; n];
    let mut wphi = vec![zero; n];
    let mut k = [vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]];
    let mut stage = vec![zero; n];
    let mut phases = [vec![zero; n], vec![zero; n], vec![zero; n]];

    // f(t, φ) = −i·u(t) ∘ W·(u(t)* ∘ φ), u_j(t) = e^{iD_j t}
    let rhs = |u: &[Complex64], x: &[Complex64], scratch: &mut [Complex64], wphi: &mut [Complex64], out: &mut [Complex64]| {
        for j in 0..n {
            scratch[j] = u[j].conj() * x[j];
        }
        offdiag.mul_complex_into(scratch, wphi);
        for j in 0..n {
            out[j] = Complex64::new(0.0, -1.0) * u[j] * wphi[j];
        }
    };

    for s in 0..steps {
        let t = s as f64 * step;
        for (slot, tt) in phases.iter_mut().zip([t, t + 0.5 * step, t + step]) {
            for j in 0..n {
                slot[j] = Complex64::from_polar(1.0, diag[j] * tt);
            }
        }
        rhs(&phases[0], &phi, &mut scratch, &mut wphi, &mut k[0]);
        for j in 0..n {
            stage[j] = phi[j] + k[0][j] * (0.5 * step);
        }
        rhs(&phases[1], &stage, &mut scratch, &mut wphi, &mut k[1]);
        for j in 0..n {
            stage[j] = phi[j] + k[1][j] * (0.5 * step);
        }
        rhs(&phases[1], &stage, &mut scratch, &mut wphi, &mut k[2]);
        for j in 0..n {
            stage[j] = phi[j] + k[2][j] * step;
        }
        rhs(&phases[2], &stage, &mut scratch, &mut wphi, &mut k[3]);
        for j in 0..n {
            phi[j] += (k[0][j] + k[1][j] * 2.0 + k[2][j] * 2.0 + k[3][j]) * (step / 6.0);
        }
    }

    Ok(StateVector::new(
        phi.iter()
            .zip(&diag)
            .map(|(p, &e)| p * Complex64::from_polar(1.0, -e * t_end))
            .collect(),
    ))
}
