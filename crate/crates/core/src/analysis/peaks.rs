use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::manifold::BasisState;

use super::reduction::n_photon_resonance_delta1;

pub const DEFAULT_PROMINENCE: f64 = 0.1;
pub const DEGENERATE_HALF_WIDTH: f64 = 0.5;

/// One resonance line crossing a fixed-Δ2 cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonancePeak {
    pub delta1: f64,
    pub height: f64,
    /// Full width at half prominence above the background.
    pub width: f64,
    pub prominence: f64,
    /// Scattering order from the nearest predicted N-photon line (heuristic).
    pub order_n: Option<usize>,
    /// Within the degenerate-mode region `|Δ1 − Δ2| < half_width·Λ1`.
    pub degenerate_vicinity: bool,
}

/// What a cut was computed for; drives the background model and the order label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSearch {
    pub initial: BasisState,
    /// Couplings and the fixed `delta2` of the cut; `delta1` is ignored.
    pub params: ModelParams,
    /// Minimum prominence above the background.
    pub prominence: f64,
    pub degenerate_half_width: f64,
}

impl PeakSearch {
    pub fn new(initial: BasisState, params: ModelParams) -> Self {
        PeakSearch { initial, params, prominence: DEFAULT_PROMINENCE, degenerate_half_width: DEGENERATE_HALF_WIDTH }
    }

    pub fn with_prominence(mut self, prominence: f64) -> Self {
        self.prominence = prominence;
        self
    }

    /// Single-mode Lorentzian `4Λ1²n1 / (4Λ1²n1 + Δ1²)`.
    pub fn background(&self, delta1: f64) -> f64 {
        lorentzian_background(self.params.lambda1, self.initial.n1, delta1)
    }

    pub fn is_degenerate(&self, delta1: f64) -> bool {
        (delta1 - self.params.delta2).abs() < self.degenerate_half_width * self.params.lambda1
    }

    /// Nearest N-photon line, `N = 2..=n1`, ties to the lower order.
    pub fn classify(&self, delta1: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for n in 2..=self.initial.n1 {
            let Ok(line) = n_photon_resonance_delta1(&self.initial, n, &self.params, self.params.delta2) else {
                continue;
            };
            let dist = (line - delta1).abs();
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((n, dist));
            }
        }
        best.map(|(n, _)| n)
    }
}

pub fn lorentzian_background(lambda1: f64, n1: usize, delta1: f64) -> f64 {
    let a = 4.0 * lambda1 * lambda1 * n1 as f64;
    if a == 0.0 {
        return 0.0;
    }
    a / (a + delta1 * delta1)
}

/// Local maximum of a sampled curve with its topographic prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RawPeak {
    pub index: usize,
    pub prominence: f64,
    pub left_base: usize,
    pub right_base: usize,
}

/// Interior local maxima with prominence in the usual topographic sense.
/// Flat tops count once, at their left end.
pub(crate) fn raw_peaks(y: &[f64]) -> Vec<RawPeak> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                out.push(prominence_of(y, i));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

fn prominence_of(y: &[f64], i: usize) -> RawPeak {
    let top = y[i];
    let (mut left_min, mut left_base) = (top, i);
    let mut k = i;
    while k > 0 {
        k -= 1;
        if y[k] > top {
            break;
        }
        if y[k] < left_min {
            left_min = y[k];
            left_base = k;
        }
    }
    let (mut right_min, mut right_base) = (top, i);
    for (k, &v) in y.iter().enumerate().skip(i + 1) {
        if v > top {
            break;
        }
        if v < right_min {
            right_min = v;
            right_base = k;
        }
    }
    RawPeak { index: i, prominence: top - left_min.max(right_min), left_base, right_base }
}

/// Full width at `y[peak] − prominence/2`, linearly interpolated, within the bases.
pub(crate) fn half_prominence_width(x: &[f64], y: &[f64], p: &RawPeak) -> f64 {
    let level = y[p.index] - 0.5 * p.prominence;
    let mut l = p.index;
    while l > p.left_base && y[l] > level {
        l -= 1;
    }
    let xl = if y[l] < level { lerp_cross(x[l], y[l], x[l + 1], y[l + 1], level) } else { x[l] };
    let mut r = p.index;
    while r < p.right_base && y[r] > level {
        r += 1;
    }
    let xr = if y[r] < level { lerp_cross(x[r - 1], y[r - 1], x[r], y[r], level) } else { x[r] };
    xr - xl
}

fn lerp_cross(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Vertex of the parabola through three points; `None` if they are collinear
/// or the vertex leaves the bracket.
pub(crate) fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d12 - d01) / (x[2] - x[0]);
    if !(a < 0.0) {
        return None;
    }
    let b = d01 - a * (x[0] + x[1]);
    let xv = -b / (2.0 * a);
    if !(x[0] <= xv && xv <= x[2]) {
        return None;
    }
    let yv = y[1] + (xv - x[1]) * (d01 + a * (xv - x[0]));
    Some((xv, yv))
}

/// Resonance peaks along a cut at fixed Δ2.
///
/// The single-mode Lorentzian background is subtracted, local maxima with
/// prominence below `search.prominence` are discarded, and each survivor is
/// located by a parabola through its three neighbouring samples. Samples may
/// be non-uniform but must be strictly ascending in Δ1.
pub fn find_peaks(delta1: &[f64], values: &[f64], search: &PeakSearch) -> Result<Vec<ResonancePeak>> {
    if delta1.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: delta1.len(), found: values.len() });
    }
    if delta1.len() < 5 {
        return Err(Error::InvalidParameter(format!("a cut needs at least 5 samples, got {}", delta1.len())));
    }
    if delta1.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("cut abscissae must be strictly ascending".into()));
    }
    let residual: Vec<f64> = delta1.iter().zip(values).map(|(&x, &v)| v - search.background(x)).collect();
    let mut peaks = Vec::new();
    for raw in raw_peaks(&residual) {
        if raw.prominence < search.prominence {
            continue;
        }
        let i = raw.index;
        let xs = [delta1[i - 1], delta1[i], delta1[i + 1]];
        let loc = parabola_vertex(xs, [residual[i - 1], residual[i], residual[i + 1]]).map_or(delta1[i], |v| v.0);
        let height = parabola_vertex(xs, [values[i - 1], values[i], values[i + 1]])
            .map_or(values[i], |v| v.1.max(values[i]))
            .clamp(0.0, 1.0);
        peaks.push(ResonancePeak {
            delta1: loc,
            height,
            width: half_prominence_width(delta1, &residual, &raw),
            prominence: raw.prominence,
            order_n: search.classify(loc),
            degenerate_vicinity: search.is_degenerate(loc),
        });
    }
    Ok(peaks)
}
