//! Two-level emitter coupled to two non-degenerate, off-resonant quantized
//! photon modes (two-mode Jaynes-Cummings model).
//!
//! - [`manifold`]: fixed-excitation product bases `|ν, n1, n2⟩`.
//! - [`hamiltonian`]: rotating-frame Hamiltonian on a manifold.
//! - [`propagator`]: Jacobi eigendecomposition, exact evolution, RK4 cross-check.
//! - [`semiclassical`]: classically driven two-level system and two-colour
//!   resonance conditions.
//! - [`analysis`]: detuning scans, peak extraction, effective two-level reduction.
//! - [`cli`]: command-line front end, file formats and plots.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod manifold;
pub mod matrix;
pub mod propagator;
pub mod semiclassical;
pub mod state;

pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, ModelParams};
pub use manifold::{BasisState, Level, Manifold};
pub use matrix::SymMatrix;
pub use state::StateVector;
