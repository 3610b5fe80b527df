use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::linspace;
use crate::manifold::BasisState;

#[derive(Debug, Parser)]
#[command(name = "twomode-jc", version, about = "Two-level emitter coupled to two off-resonant quantized modes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact time evolution of one initial basis state.
    Dynamics(DynamicsArgs),
    /// Maximum excited-state occupation over a detuning grid.
    Scan(ScanArgs),
    /// Δ1 cut at a single Δ2 with line refinement and peak report.
    Cut(ScanArgs),
    /// Single classical drive, compared to the detuned Rabi formula.
    Rabi(RabiArgs),
    /// Two equal constant drives: resonant Δ2 for a given Δ1.
    SuperCw(SuperCwArgs),
    /// Pulsed two-colour resonance Δ2 = Δ1 + √(Δ1² + Ω1²).
    SuperPulsed(SuperPulsedArgs),
    /// Resonance predictors of the effective two-level reduction.
    Predict(PredictArgs),
    /// Reduced chain Hamiltonian and effective two-level parameters.
    Reduce(ReduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Data file; written to stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also render an SVG plot to this path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_parser = parse_state)]
    pub initial: BasisState,
    /// Mode couplings `l1,l2` (or one value for both), in units of Λ.
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    pub lambda: (f64, f64),
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub d1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub d2: f64,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// Number of uniformly spaced samples over [0, t_end].
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    /// Basis states whose populations are added as columns.
    #[arg(long, value_parser = parse_state, value_delimiter = ';')]
    pub track: Vec<BasisState>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Value or `start:stop:count`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub d1: Range,
    /// Value or `start:stop:count`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub d2: Range,
    /// Evolution horizon; 5000 for up to two excitations, 50000 above.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Fixed number of time samples instead of the Nyquist-safe step.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Skip extra evaluations around undersampled lines (cuts only).
    #[arg(long)]
    pub no_refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RabiArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub delta: f64,
    /// Defaults to 20π/Ω.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Defaults to 0.01/max(Ω, |Δ|).
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SuperCwArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub d1: f64,
    /// Also integrate both drives up to this time and report max P_x.
    #[arg(long)]
    pub simulate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SuperPulsedArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub d1: f64,
    #[arg(long)]
    pub omega_max: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Predict Δ2 of the two-photon line from Δ1.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "d2")]
    pub d1: Option<f64>,
    /// Predict Δ1 of every N-photon line from Δ2.
    #[arg(long, allow_hyphen_values = true)]
    pub d2: Option<f64>,
    /// Classical Rabi frequency for the opposite-sign detuning estimate |Δ1| − Ω.
    #[arg(long, requires = "d1")]
    pub dichromatic: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub d1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub d2: f64,
}

/// Inclusive linear range, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }

    pub fn is_single(&self) -> bool {
        self.count == 1
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v = f64::from_str(s.trim()).map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => {
            let v = parse_f64(v)?;
            Ok(Range { start: v, stop: v, count: 1 })
        }
        [a, b, n] => {
            let (start, stop) = (parse_f64(a)?, parse_f64(b)?);
            let count: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a point count"))?;
            if count < 2 {
                return Err("a range needs at least 2 points".into());
            }
            if !(start < stop) {
                return Err(format!("range start {start} must be below stop {stop}"));
            }
            Ok(Range { start, stop, count })
        }
        _ => Err(format!("`{s}` is neither a value nor start:stop:count")),
    }
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let (a, b) = match parts.as_slice() {
        [v] => (parse_f64(v)?, parse_f64(v)?),
        [a, b] => (parse_f64(a)?, parse_f64(b)?),
        _ => return Err(format!("`{s}` must be `l1,l2` or a single value")),
    };
    if a > 0.0 && b > 0.0 {
        Ok((a, b))
    } else {
        Err("couplings must be positive".into())
    }
}

pub fn parse_state(s: &str) -> Result<BasisState, String> {
    BasisState::from_str(s).map_err(|e| e.to_string())
}
