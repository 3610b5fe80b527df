use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

use super::EigenDecomposition;

pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to ‖H‖_F.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
///
/// Sweeps over all `(p, q)` pairs in row order, annihilating each
/// off-diagonal element with a plane rotation, until the off-diagonal norm
/// drops below `1e-12·‖H‖_F`. Eigenvalues come back ascending; each
/// eigenvector is signed so that its largest-modulus component is positive.
pub fn eigendecompose(h: &SymMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot diagonalize an empty matrix".into()));
    }
    let mut a = h.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = h.norm_frobenius();
    let threshold = OFF_DIAGONAL_TOLERANCE * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let pivot = (0..n)
            .max_by(|&i, &j| v[i * n + k].abs().total_cmp(&v[j * n + k].abs()))
            .unwrap_or(0);
        let sign = if v[pivot * n + k] < 0.0 { -1.0 } else { 1.0 };
        for row in 0..n {
            vectors[row * n + col] = sign * v[row * n + k];
        }
    }
    Ok(EigenDecomposition::from_parts(values, vectors, sweeps))
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    // smaller root of t² + 2θt − 1 = 0
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
    for r in 0..n {
        let vrp = v[r * n + p];
        let vrq = v[r * n + q];
        v[r * n + p] = c * vrp - s * vrq;
        v[r * n + q] = s * vrp + c * vrq;
    }
}
