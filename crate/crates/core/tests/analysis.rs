use twomode_jc::analysis::{
    adiabatic_elimination, lorentzian_background, max_occupation, scan_detunings, slow_oscillation_period, ScanGrid,
};
use twomode_jc::{BasisState, ModelParams};

#[test]
fn two_photon_resonance_point_is_nearly_inverted() {
    let r = max_occupation(&ModelParams::symmetric(4.62, 10.0), &BasisState::ground(2, 0), 5000.0).unwrap();
    assert!(r.max > 0.95, "{r:?}");
    assert!(r.t_at_max > 0.0 && r.t_at_max <= 5000.0);
}

#[test]
fn off_resonant_point_sits_on_the_single_mode_background() {
    let r = max_occupation(&ModelParams::symmetric(8.0, 10.0), &BasisState::ground(2, 0), 5000.0).unwrap();
    let bound = lorentzian_background(1.0, 2, 8.0);
    assert!((r.max - 0.11).abs() <= 0.05, "{r:?}");
    assert!((r.max - bound).abs() < 0.02, "{} vs Rabi bound {bound}", r.max);
}

#[test]
fn two_photon_line_follows_half_slope() {
    // brightest Δ1 for each Δ2 column tracks Δ1 ≈ Δ2/2
    let d1: Vec<f64> = (0..181).map(|i| 1.0 + 0.05 * i as f64).collect();
    let d2 = vec![8.0, 12.0];
    let grid = ScanGrid::new(d1.clone(), d2.clone(), ModelParams::symmetric(0.0, 0.0), BasisState::ground(2, 0), 2000.0);
    let r = scan_detunings(&grid).unwrap();
    let argmax = |j: usize| {
        (0..d1.len())
            .filter(|&i| d1[i] > 2.5 && (d1[i] - d2[j]).abs() > 1.0)
            .max_by(|&a, &b| r.max_occupation[a][j].total_cmp(&r.max_occupation[b][j]))
            .map(|i| d1[i])
            .unwrap()
    };
    let slope = (argmax(1) - argmax(0)) / (d2[1] - d2[0]);
    assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
}

#[test]
fn effective_envelope_at_a_far_detuned_two_photon_resonance() {
    // Δ1 = 8: locate the full-model resonance along Δ2, then compare the slow period
    let init = BasisState::ground(2, 0);
    let period = |d2: f64| slow_oscillation_period(&ModelParams::symmetric(8.0, d2), &init).unwrap();
    let (mut lo, mut hi) = (16.0, 17.0);
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if period(a) > period(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let d2 = 0.5 * (lo + hi);
    let full = period(d2);
    let eff = adiabatic_elimination(2, 0, &ModelParams::symmetric(8.0, d2)).unwrap();
    assert!((eff.period() / full - 1.0).abs() <= 0.1, "effective {} vs full {full} at Δ2 = {d2}", eff.period());
    assert!(!eff.outside_validity);
}
