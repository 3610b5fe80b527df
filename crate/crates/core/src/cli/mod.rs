//! Command-line front end.
//!
//! Every data file embeds the resolved configuration (`#` comment lines for
//! CSV, a `config` object for JSON); output is deterministic for a given
//! configuration. Exit status: 0 success, 2 invalid input, 3 numerical
//! failure, 4 I/O failure. `TWOMODE_JC_WORKERS` caps the worker threads.

pub mod args;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use crate::analysis::{
    adiabatic_elimination, default_horizon, dichromatic_predict, n_photon_final_state, n_photon_resonance_delta1,
    reduced_hamiltonian6, resonance_predict_appendix, scan_cut, scan_detunings, two_photon_resonance_delta1,
    CutRefinement, MaxSearch, PeakSearch, ResonancePeak, Sampling, ScanGrid,
};
use crate::error::Error;
use crate::hamiltonian::ModelParams;
use crate::manifold::{BasisState, Manifold};
use crate::propagator::{eigendecompose, occupation_trace};
use crate::semiclassical::{default_dt, max_accurate_dt, rabi_analytic, simulate_two_level, super_resonance_cw, super_resonance_pulsed, DriveField};
use crate::state::StateVector;

use args::{Cli, Command, DynamicsArgs, Format, ModelArgs, OutputArgs, PredictArgs, RabiArgs, ReduceArgs, ScanArgs, SuperCwArgs, SuperPulsedArgs};
use output::{Table, TableFile};

pub const WORKERS_ENV: &str = "TWOMODE_JC_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(_) => 2,
            CliError::Io { .. } => 4,
        }
    }

    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            3 => "numerical",
            4 => "io",
            _ => "usage",
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_workers() {
        eprintln!("error[{}]: {e}", e.category());
        return e.exit_code();
    }
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            e.exit_code()
        }
    }
}

fn configure_workers() -> CliResult {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    // a pool already built by an earlier call keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command. Data goes to the `--out` file when given (summary on
/// `out`), otherwise to `out` with the summary on `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut io = Streams { out, err };
    match cli.command {
        Command::Dynamics(a) => dynamics(a, &mut io),
        Command::Scan(a) => scan(a, false, &mut io),
        Command::Cut(a) => scan(a, true, &mut io),
        Command::Rabi(a) => rabi(a, &mut io),
        Command::SuperCw(a) => super_cw(a, &mut io),
        Command::SuperPulsed(a) => super_pulsed(a, &mut io),
        Command::Predict(a) => predict(a, &mut io),
        Command::Reduce(a) => reduce(a, &mut io),
    }
}

struct Streams<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Streams<'_> {
    fn line(&mut self, s: &str) -> CliResult {
        writeln!(self.out, "{s}").map_err(stdout_err)
    }

    fn warn(&mut self, s: &str) -> CliResult {
        writeln!(self.err, "warning: {s}").map_err(stdout_err)
    }

    /// Writes the data artefact and then the summary line.
    fn emit(&mut self, o: &OutputArgs, data: &str, summary: &str) -> CliResult {
        match &o.out {
            Some(path) => {
                write_file(path, data)?;
                writeln!(self.out, "{summary}").map_err(stdout_err)
            }
            None => {
                self.out.write_all(data.as_bytes()).map_err(stdout_err)?;
                writeln!(self.err, "{summary}").map_err(stdout_err)
            }
        }
    }
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), source: e }
}

fn write_file(path: &Path, data: &str) -> CliResult {
    std::fs::write(path, data).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn write_plot(o: &OutputArgs, svg: impl FnOnce() -> String) -> CliResult {
    match &o.plot {
        Some(path) => write_file(path, &svg()),
        None => Ok(()),
    }
}

fn model_params(m: &ModelArgs, d1: f64, d2: f64) -> CliResult<ModelParams> {
    Ok(ModelParams::new(d1, d2, m.lambda.0, m.lambda.1)?)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn state_json(s: &BasisState) -> Value {
    json!(s.to_string())
}

fn column_name(s: &BasisState) -> String {
    let level = if s.is_excited() { "x" } else { "g" };
    format!("pop_{level}_{}_{}", s.n1, s.n2)
}

fn dynamics(a: DynamicsArgs, io: &mut Streams) -> CliResult {
    let p = model_params(&a.model, a.d1, a.d2)?;
    let t_end = positive("t-end", a.t_end)?;
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let init = a.model.initial;
    let m = Manifold::containing(&init);
    let d = eigendecompose(&crate::hamiltonian::build_hamiltonian(&m, &p))?;
    let psi0 = StateVector::basis(m.dim(), m.index_of(&init)?);
    let times = crate::analysis::linspace(0.0, t_end, a.samples);
    let trace = occupation_trace(&d, &m, &psi0, &times, &a.track)?;

    let config = json!({
        "command": "dynamics",
        "initial_state": state_json(&init),
        "params": p,
        "t_end": t_end,
        "samples": a.samples,
        "tracked": a.track.iter().map(state_json).collect::<Vec<_>>(),
        "units": "energies in Λ, time in 1/Λ",
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut table = Table::new(["t", "p_excited", "n_mode1", "n_mode2", "norm"]);
    table.columns.extend(trace.tracked.iter().map(|t| column_name(&t.state)));
    for k in 0..trace.len() {
        let mut row = vec![trace.times[k], trace.p_excited[k], trace.n_mode1[k], trace.n_mode2[k], trace.norm[k]];
        row.extend(trace.tracked.iter().map(|t| t.population[k]));
        table.rows.push(row);
    }
    let data = match a.output.format {
        Format::Csv => table.to_csv(&config),
        Format::Json => output::json_document(&config, &trace)?,
    };
    write_plot(&a.output, || {
        let mut series: Vec<(String, &[f64])> = vec![("P_x".into(), &trace.p_excited)];
        series.extend(trace.tracked.iter().map(|t| (t.state.to_string(), t.population.as_slice())));
        let named: Vec<(&str, &[f64])> = series.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        plot::line_plot(&trace.times, &named, "t [1/Λ]", "population", &format!("dynamics from {init}"))
    })?;
    let (pmax, tmax) = trace
        .p_excited
        .iter()
        .zip(&trace.times)
        .fold((0.0f64, 0.0), |b, (&v, &t)| if v > b.0 { (v, t) } else { b });
    let summary = format!(
        "dynamics {init}: max P_x = {} at t = {}, norm error {:.1e}",
        fmt4(pmax),
        fmt4(tmax),
        trace.max_norm_error()
    );
    io.emit(&a.output, &data, &summary)
}

fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" { "0.0000".into() } else { s }
}

fn peak_summary(peaks: &[ResonancePeak]) -> String {
    let main: Vec<String> = peaks
        .iter()
        .filter(|p| !p.degenerate_vicinity)
        .map(|p| {
            let order = p.order_n.map_or("-".to_string(), |n| n.to_string());
            format!("Δ1/Λ = {} (height {}, width {}, N = {order})", fmt4(p.delta1), fmt4(p.height), fmt4(p.width))
        })
        .collect();
    let flagged = peaks.iter().filter(|p| p.degenerate_vicinity).count();
    let mut s = if main.is_empty() { "no resonance peaks above background".to_string() } else { format!("peaks: {}", main.join("; ")) };
    if flagged > 0 {
        s.push_str(&format!(" [{flagged} more near Δ1 = Δ2, flagged degenerate]"));
    }
    s
}

fn scan(a: ScanArgs, require_cut: bool, io: &mut Streams) -> CliResult {
    let init = a.model.initial;
    if init.is_excited() {
        return Err(CliError::Usage(format!("--initial {init} must be a ground-level state")));
    }
    let couplings = model_params(&a.model, 0.0, 0.0)?;
    let horizon = match a.horizon {
        Some(h) => positive("horizon", h)?,
        None => default_horizon(&init),
    };
    let search = MaxSearch {
        sampling: match a.samples {
            Some(n) if n >= 2 => Sampling::Samples(n),
            Some(n) => return Err(CliError::Usage(format!("--samples must be at least 2, got {n}"))),
            None => Sampling::NyquistAuto,
        },
        ..MaxSearch::new(horizon)
    };
    let is_cut = a.d2.is_single() && !a.d1.is_single();
    if require_cut && !is_cut {
        return Err(CliError::Usage("cut needs a Δ1 range and a single Δ2 value".into()));
    }
    let refine = if a.no_refine { CutRefinement::disabled() } else { CutRefinement::default() };
    let mut config = json!({
        "command": if require_cut { "cut" } else { "scan" },
        "initial_state": state_json(&init),
        "lambda1": couplings.lambda1,
        "lambda2": couplings.lambda2,
        "delta1": a.d1,
        "delta2": a.d2,
        "horizon": horizon,
        "sampling": search.sampling,
        "refine_tolerance": search.tolerance,
        "degenerate_vicinity": "|delta1 - delta2| < 0.5 lambda1",
        "units": "detunings in Λ, time in 1/Λ",
        "version": env!("CARGO_PKG_VERSION"),
    });

    let (d1_values, d2_values, max_occ, argmax, degenerate, peaks) = if is_cut {
        let d2 = a.d2.start;
        let cut = scan_cut(&a.d1.values(), d2, &couplings, &init, &search, &refine)?;
        let peaks = cut.peaks(&PeakSearch::new(init, couplings.with_detunings(0.0, d2)))?;
        config["refinement"] = json!(refine);
        config["refined_points"] = json!(cut.refined_points);
        config["peak_prominence"] = json!(crate::analysis::peaks::DEFAULT_PROMINENCE);
        let ps = PeakSearch::new(init, couplings.with_detunings(0.0, d2));
        let deg = cut.delta1.iter().map(|&x| vec![ps.is_degenerate(x)]).collect();
        let col = |v: &[f64]| v.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        (cut.delta1.clone(), vec![d2], col(&cut.max_occupation), col(&cut.argmax_time), deg, Some(peaks))
    } else {
        let grid = ScanGrid { sampling: search.sampling, ..ScanGrid::new(a.d1.values(), a.d2.values(), couplings, init, horizon) };
        let r = scan_detunings(&grid)?;
        (r.grid.delta1_values, r.grid.delta2_values, r.max_occupation, r.argmax_time, r.degenerate_vicinity, None)
    };

    let file = TableFile {
        config: &config,
        delta1_values: &d1_values,
        delta2_values: &d2_values,
        max_occupation: &max_occ,
        argmax_time: &argmax,
        degenerate_vicinity: &degenerate,
        peaks: peaks.as_deref(),
    };
    let data = match a.output.format {
        Format::Csv => file.to_csv(),
        Format::Json => file.to_json()?,
    };
    write_plot(&a.output, || {
        if is_cut {
            let y: Vec<f64> = max_occ.iter().map(|r| r[0]).collect();
            plot::line_plot(&d1_values, &[("max P_x", &y)], "Δ1 [Λ]", "max occupation", &format!("{init}, Δ2 = {}", d2_values[0]))
        } else {
            plot::heatmap(&d2_values, &d1_values, &max_occ, "Δ2 [Λ]", "Δ1 [Λ]", &format!("max occupation from {init}"))
        }
    })?;
    let summary = match &peaks {
        Some(p) => peak_summary(p),
        None => {
            let mut best = (f64::NEG_INFINITY, 0, 0);
            for (i, row) in max_occ.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if v > best.0 {
                        best = (v, i, j);
                    }
                }
            }
            format!(
                "scan {}×{}: max occupation {} at (Δ1, Δ2) = ({}, {})",
                d1_values.len(),
                d2_values.len(),
                fmt4(best.0),
                fmt4(d1_values[best.1]),
                fmt4(d2_values[best.2])
            )
        }
    };
    io.emit(&a.output, &data, &summary)
}

fn rabi(a: RabiArgs, io: &mut Streams) -> CliResult {
    let omega = positive("omega", a.omega)?;
    let drive = [DriveField::cw(omega, a.delta)];
    drive[0].validate()?;
    let t_end = match a.t_end {
        Some(t) => positive("t-end", t)?,
        None => 20.0 * std::f64::consts::PI / omega,
    };
    let dt = match a.dt {
        Some(dt) => positive("dt", dt)?,
        None => default_dt(&drive),
    };
    let trace = simulate_two_level(&drive, t_end, dt)?;
    if trace.step_too_large {
        io.warn(&format!("dt = {dt} exceeds {:.3e}; accuracy is not guaranteed", max_accurate_dt(&drive)))?;
    }
    let analytic: Vec<f64> = trace.times.iter().map(|&t| rabi_analytic(omega, a.delta, t)).collect::<Result<_, _>>()?;
    let config = json!({
        "command": "rabi",
        "omega": omega,
        "delta": a.delta,
        "t_end": t_end,
        "dt": dt,
        "units": "frequencies in Ω, time in 1/Ω",
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut table = Table::new(["t", "p_excited", "analytic", "norm"]);
    for k in 0..trace.times.len() {
        table.rows.push(vec![trace.times[k], trace.p_excited[k], analytic[k], trace.norm[k]]);
    }
    let data = match a.output.format {
        Format::Csv => table.to_csv(&config),
        Format::Json => output::json_document(&config, &json!({ "trace": trace, "analytic": analytic }))?,
    };
    write_plot(&a.output, || {
        plot::line_plot(&trace.times, &[("RK4", &trace.p_excited), ("analytic", &analytic)], "t [1/Ω]", "P_x", "Rabi oscillation")
    })?;
    let deviation = trace.p_excited.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let summary = format!("rabi: max P_x = {}, max deviation from analytic {:.1e}", fmt4(trace.max_excited().0), deviation);
    io.emit(&a.output, &data, &summary)
}

fn super_cw(a: SuperCwArgs, io: &mut Streams) -> CliResult {
    let omega0 = positive("omega0", a.omega0)?;
    let d2 = super_resonance_cw(omega0, a.d1)? * if a.d1 < 0.0 { -1.0 } else { 1.0 };
    io.line(&fmt4(d2))?;
    if let Some(t_end) = a.simulate {
        let t_end = positive("simulate", t_end)?;
        let drives = [DriveField::cw(omega0, a.d1), DriveField::cw(omega0, d2)];
        let trace = simulate_two_level(&drives, t_end, default_dt(&drives))?;
        let (p, t) = trace.max_excited();
        io.line(&format!("max P_x = {} at t = {}", fmt4(p), fmt4(t)))?;
    }
    Ok(())
}

fn super_pulsed(a: SuperPulsedArgs, io: &mut Streams) -> CliResult {
    let v = super_resonance_pulsed(a.d1, positive("omega-max", a.omega_max)?)?;
    io.line(&fmt4(v))
}

fn predict(a: PredictArgs, io: &mut Streams) -> CliResult {
    let init = a.model.initial;
    if init.is_excited() {
        return Err(CliError::Usage(format!("--initial {init} must be a ground-level state")));
    }
    let couplings = model_params(&a.model, 0.0, 0.0)?;
    match (a.d1, a.d2) {
        (Some(d1), _) => {
            let d2 = resonance_predict_appendix(init.n1, init.n2, &couplings, d1)?;
            io.line(&format!("two-photon line {init} -> {}: delta2 = {}", n_photon_final_state(&init, 2)?, fmt4(d2)))?;
            if let Some(omega) = a.dichromatic {
                let omega = positive("dichromatic", omega)?;
                io.line(&format!("dichromatic estimate (coarse): delta2 = {}", fmt4(dichromatic_predict(d1, omega))))?;
            }
            Ok(())
        }
        (None, Some(d2)) => {
            if init.n1 < 2 {
                return Err(Error::InsufficientPhotons { n1: init.n1, order: 2 }.into());
            }
            let two = two_photon_resonance_delta1(init.n1, init.n2, &couplings, d2);
            for n in 2..=init.n1 {
                let fin = n_photon_final_state(&init, n)?;
                let d1 = n_photon_resonance_delta1(&init, n, &couplings, d2)?;
                let label = if n == 2 && two.is_err() { " (no real root; line vertex)" } else if n > 2 { " (heuristic)" } else { "" };
                io.line(&format!("N = {n}: {init} -> {fin}: delta1 = {}{label}", fmt4(d1)))?;
            }
            Ok(())
        }
        (None, None) => Err(CliError::Usage("predict needs --d1 or --d2".into())),
    }
}

fn reduce(a: ReduceArgs, io: &mut Streams) -> CliResult {
    let init = a.model.initial;
    if init.is_excited() {
        return Err(CliError::Usage(format!("--initial {init} must be a ground-level state")));
    }
    let p = model_params(&a.model, a.d1, a.d2)?;
    let r = reduced_hamiltonian6(init.n1, init.n2, &p)?;
    let eff = adiabatic_elimination(init.n1, init.n2, &p)?;
    if eff.outside_validity {
        io.warn(&format!("Λ√n / |Δ1 − Δ2| = {:.3} exceeds the elimination validity limit", eff.validity_ratio))?;
    }
    let doc = json!({
        "config": { "command": "reduce", "initial_state": state_json(&init), "params": p, "version": env!("CARGO_PKG_VERSION") },
        "states": r.states.iter().map(state_json).collect::<Vec<_>>(),
        "matrix": r.matrix.rows(),
        "effective": eff,
        "final_state": state_json(&n_photon_final_state(&init, 2)?),
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
    io.line(&text)
}
