use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::manifold::BasisState;

use super::occupation::{max_occupation_with, MaxOccupation, MaxSearch, Sampling};
use super::peaks::{find_peaks, raw_peaks, PeakSearch, ResonancePeak};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub delta1_values: Vec<f64>,
    pub delta2_values: Vec<f64>,
    /// Couplings; the detunings are overwritten per grid point.
    pub params: ModelParams,
    pub initial_state: BasisState,
    pub horizon: f64,
    pub sampling: Sampling,
}

impl ScanGrid {
    pub fn new(delta1_values: Vec<f64>, delta2_values: Vec<f64>, params: ModelParams, initial_state: BasisState, horizon: f64) -> Self {
        ScanGrid { delta1_values, delta2_values, params, initial_state, horizon, sampling: Sampling::NyquistAuto }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta1", &self.delta1_values), ("delta2", &self.delta2_values)] {
            if v.is_empty() {
                return Err(Error::InvalidParameter(format!("{name} grid is empty")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} grid has non-finite values")));
            }
            if v.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidParameter(format!("{name} grid must be strictly ascending")));
            }
        }
        if self.initial_state.is_excited() {
            return Err(Error::InvalidParameter(format!("initial state {} must be ground-level", self.initial_state)));
        }
        self.search().validate()
    }

    pub fn search(&self) -> MaxSearch {
        MaxSearch { sampling: self.sampling, ..MaxSearch::new(self.horizon) }
    }

    pub fn len(&self) -> usize {
        self.delta1_values.len() * self.delta2_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid: ScanGrid,
    /// `[delta1 index][delta2 index]`.
    pub max_occupation: Vec<Vec<f64>>,
    pub argmax_time: Vec<Vec<f64>>,
    pub degenerate_vicinity: Vec<Vec<bool>>,
}

impl ScanResult {
    /// Largest `|a − b|` over matching cells.
    pub fn max_abs_diff(&self, other: &ScanResult) -> f64 {
        self.max_occupation
            .iter()
            .flatten()
            .zip(other.max_occupation.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn degenerate(d1: f64, d2: f64, lambda1: f64) -> bool {
    (d1 - d2).abs() < super::peaks::DEGENERATE_HALF_WIDTH * lambda1
}

/// Maximum occupation over every `(Δ1, Δ2)` pair; points run in parallel.
pub fn scan_detunings(g: &ScanGrid) -> Result<ScanResult> {
    g.validate()?;
    let n2 = g.delta2_values.len();
    let search = g.search();
    let cells: Vec<Result<MaxOccupation>> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (d1, d2) = (g.delta1_values[k / n2], g.delta2_values[k % n2]);
            max_occupation_with(&g.params.with_detunings(d1, d2), &g.initial_state, &search)
                .map_err(|e| Error::ScanPoint { delta1: d1, delta2: d2, source: Box::new(e) })
        })
        .collect();
    let mut max_occupation = vec![vec![0.0; n2]; g.delta1_values.len()];
    let mut argmax_time = max_occupation.clone();
    for (k, cell) in cells.into_iter().enumerate() {
        let c = cell?;
        max_occupation[k / n2][k % n2] = c.max;
        argmax_time[k / n2][k % n2] = c.t_at_max;
    }
    let degenerate_vicinity = g
        .delta1_values
        .iter()
        .map(|&d1| g.delta2_values.iter().map(|&d2| degenerate(d1, d2, g.params.lambda1)).collect())
        .collect();
    Ok(ScanResult { grid: g.clone(), max_occupation, argmax_time, degenerate_vicinity })
}

/// Controls for resolving narrow lines the base grid undersamples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutRefinement {
    /// Prominence above background that marks a candidate line.
    pub candidate_prominence: f64,
    /// A candidate is resolved once this many samples lie above its half-prominence level.
    pub min_samples: usize,
    /// Points inserted between the neighbours of an unresolved maximum.
    pub insert: usize,
    pub max_rounds: usize,
}

impl Default for CutRefinement {
    fn default() -> Self {
        CutRefinement { candidate_prominence: 0.02, min_samples: 5, insert: 16, max_rounds: 4 }
    }
}

impl CutRefinement {
    pub fn disabled() -> Self {
        CutRefinement { max_rounds: 0, ..Self::default() }
    }
}

/// A one-dimensional scan along Δ1 at fixed Δ2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub delta2: f64,
    /// Ascending, possibly non-uniform after refinement.
    pub delta1: Vec<f64>,
    pub max_occupation: Vec<f64>,
    pub argmax_time: Vec<f64>,
    /// Samples added by refinement.
    pub refined_points: usize,
}

impl Cut {
    pub fn peaks(&self, search: &PeakSearch) -> Result<Vec<ResonancePeak>> {
        find_peaks(&self.delta1, &self.max_occupation, search)
    }
}

fn evaluate(d1: &[f64], d2: f64, params: &ModelParams, initial: &BasisState, search: &MaxSearch) -> Result<Vec<MaxOccupation>> {
    d1.par_iter()
        .map(|&x| {
            max_occupation_with(&params.with_detunings(x, d2), initial, search)
                .map_err(|e| Error::ScanPoint { delta1: x, delta2: d2, source: Box::new(e) })
        })
        .collect()
}

/// Scans `delta1_values` at fixed `delta2`, then densifies around every
/// candidate line that has fewer than `min_samples` points above its
/// half-prominence level. The new points are model evaluations, not
/// interpolation, so narrow high-order lines keep their true height.
pub fn scan_cut(
    delta1_values: &[f64],
    delta2: f64,
    params: &ModelParams,
    initial: &BasisState,
    search: &MaxSearch,
    refine: &CutRefinement,
) -> Result<Cut> {
    let grid = ScanGrid {
        delta1_values: delta1_values.to_vec(),
        delta2_values: vec![delta2],
        params: *params,
        initial_state: *initial,
        horizon: search.horizon,
        sampling: search.sampling,
    };
    grid.validate()?;
    let base = evaluate(delta1_values, delta2, params, initial, search)?;
    let mut pts: Vec<(f64, MaxOccupation)> = delta1_values.iter().copied().zip(base).collect();
    let peak_search = PeakSearch::new(*initial, params.with_detunings(0.0, delta2));
    let mut added = 0;
    for _ in 0..refine.max_rounds {
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let residual: Vec<f64> = pts.iter().map(|p| p.1.max - peak_search.background(p.0)).collect();
        let mut new_x = Vec::new();
        for raw in raw_peaks(&residual) {
            if raw.prominence < refine.candidate_prominence {
                continue;
            }
            let level = residual[raw.index] - 0.5 * raw.prominence;
            let above = (raw.left_base..=raw.right_base).filter(|&k| residual[k] >= level).count();
            if above >= refine.min_samples {
                continue;
            }
            let (lo, hi) = (x[raw.index - 1], x[raw.index + 1]);
            let step = (hi - lo) / (refine.insert + 1) as f64;
            new_x.extend((1..=refine.insert).map(|k| lo + step * k as f64).filter(|v| !x.contains(v)));
        }
        if new_x.is_empty() {
            break;
        }
        new_x.sort_by(f64::total_cmp);
        new_x.dedup();
        let vals = evaluate(&new_x, delta2, params, initial, search)?;
        added += new_x.len();
        pts.extend(new_x.into_iter().zip(vals));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
    }
    Ok(Cut {
        delta2,
        delta1: pts.iter().map(|p| p.0).collect(),
        max_occupation: pts.iter().map(|p| p.1.max).collect(),
        argmax_time: pts.iter().map(|p| p.1.t_at_max).collect(),
        refined_points: added,
    })
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::occupation::max_occupation;

    #[test]
    fn single_cell_matches_point_evaluation() {
        let p = ModelParams::symmetric(0.0, 0.0);
        let init = BasisState::ground(2, 0);
        let g = ScanGrid::new(vec![4.0], vec![9.0], p, init, 300.0);
        let r = scan_detunings(&g).unwrap();
        let direct = max_occupation(&p.with_detunings(4.0, 9.0), &init, 300.0).unwrap();
        assert_eq!(r.max_occupation, vec![vec![direct.max]]);
        assert_eq!(r.argmax_time, vec![vec![direct.t_at_max]]);
    }

    #[test]
    fn cells_land_in_grid_order() {
        let p = ModelParams::symmetric(0.0, 0.0);
        let init = BasisState::ground(1, 1);
        let g = ScanGrid::new(linspace(-3.0, 3.0, 4), linspace(1.0, 5.0, 3), p, init, 50.0);
        let r = scan_detunings(&g).unwrap();
        for (i, &d1) in g.delta1_values.iter().enumerate() {
            for (j, &d2) in g.delta2_values.iter().enumerate() {
                let want = max_occupation(&p.with_detunings(d1, d2), &init, 50.0).unwrap().max;
                assert_eq!(r.max_occupation[i][j], want);
                assert!((0.0..=1.0).contains(&r.max_occupation[i][j]));
            }
        }
        assert!(r.degenerate_vicinity[3][1]);
        assert!(!r.degenerate_vicinity[0][0]);
    }

    #[test]
    fn grid_validation() {
        let p = ModelParams::symmetric(0.0, 0.0);
        let init = BasisState::ground(1, 0);
        assert!(scan_detunings(&ScanGrid::new(vec![], vec![1.0], p, init, 10.0)).is_err());
        assert!(scan_detunings(&ScanGrid::new(vec![2.0, 1.0], vec![1.0], p, init, 10.0)).is_err());
        assert!(scan_detunings(&ScanGrid::new(vec![1.0], vec![1.0], p, BasisState::excited(1, 0), 10.0)).is_err());
        assert!(scan_detunings(&ScanGrid::new(vec![1.0], vec![1.0], p, init, -1.0)).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn refinement_recovers_an_undersampled_line() {
        // two-photon line at Δ2 = 20 is ~0.03 wide; a 0.025 grid misses its height
        let p = ModelParams::symmetric(0.0, 0.0);
        let init = BasisState::ground(2, 0);
        let x = linspace(9.5, 10.0, 21);
        let search = MaxSearch::new(2000.0);
        let coarse = scan_cut(&x, 20.0, &p, &init, &search, &CutRefinement::disabled()).unwrap();
        let fine = scan_cut(&x, 20.0, &p, &init, &search, &CutRefinement::default()).unwrap();
        assert_eq!(coarse.refined_points, 0);
        assert!(fine.refined_points > 0);
        let top = fine.max_occupation.iter().copied().fold(0.0, f64::max);
        assert!(top > 0.9, "refined top {top}");
        assert!(fine.delta1.windows(2).all(|w| w[0] < w[1]));
    }
}
