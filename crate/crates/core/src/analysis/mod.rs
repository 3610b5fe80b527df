//! Detuning scans of the maximal excited-state occupation, resonance-line
//! extraction along cuts, and the effective two-level reduction of the
//! two-photon scattering chain.

pub mod occupation;
pub mod peaks;
pub mod reduction;
pub mod scan;

pub use occupation::{default_horizon, max_occupation, max_occupation_with, MaxOccupation, MaxSearch, Sampling};
pub use peaks::{find_peaks, lorentzian_background, PeakSearch, ResonancePeak};
pub use reduction::{
    adiabatic_elimination, dichromatic_predict, n_photon_final_state, n_photon_resonance_delta1, reduced_hamiltonian6,
    resonance_predict_appendix, slow_oscillation_period, two_photon_resonance_delta1, EffectiveTwoLevel,
    ReducedHamiltonian,
};
pub use scan::{linspace, scan_cut, scan_detunings, Cut, CutRefinement, ScanGrid, ScanResult};
