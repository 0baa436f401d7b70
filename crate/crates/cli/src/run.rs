//! Executes a resolved configuration.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use grover_dephasing::analytics::{approx_for, optimal_steps};
use grover_dephasing::full::{FullSimulator, NoiseConfig, DEFAULT_MAX_N};
use grover_dephasing::metrics::{fit_exponent, scaling_point, sort_records, GridConfig, KRule, ScalingRecord};
use grover_dephasing::reduced::evolve;
use grover_dephasing::spectral::verify_perturbation;
use grover_dephasing::walk::{
    aggregate_shots, averaged_dephasing_factor, map_walk_to_grover, simulate_walk_averaged_with_cap, walk_shot,
    StarWalkSpec,
};
use grover_dephasing::{NoiseParams, ProblemSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_grid, ExperimentConfig, ScalingConfig, SpectrumConfig, TraceConfig, WalkConfig};
use crate::error::CliError;
use crate::output::{finite, format_float, trace_csv, Column};

pub const MAX_FULL_N_VAR: &str = "GROVER_MAX_FULL_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunContext {
    /// Largest `N` for exact simulations (and spokes for the averaged walk).
    pub max_full_n: usize,
}

impl Default for RunContext {
    fn default() -> Self {
        Self { max_full_n: DEFAULT_MAX_N }
    }
}

impl RunContext {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(MAX_FULL_N_VAR) {
            Ok(v) => v
                .trim()
                .parse()
                .map(|max_full_n| Self { max_full_n })
                .map_err(|_| CliError::Config(format!("{MAX_FULL_N_VAR} must be a non-negative integer, got {v:?}"))),
            Err(_) => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// CSV for curves and scans, JSON for spectra.
    pub primary: String,
    pub meta: Value,
    /// Exponent fit, for scans only.
    pub fit: Option<Value>,
}

pub fn execute(config: &ExperimentConfig, ctx: &RunContext) -> Result<RunOutput, CliError> {
    let (primary, summary, fit) = match config {
        ExperimentConfig::Simulate(c) => run_trace(c, c.full, ctx)?,
        ExperimentConfig::Compare(c) => run_trace(c, true, ctx)?,
        ExperimentConfig::Spectrum(c) => run_spectrum(c)?,
        ExperimentConfig::Scaling(c) => run_scaling(c)?,
        ExperimentConfig::Walk(c) => run_walk(c, ctx)?,
    };
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command(),
        "config": serde_json::to_value(config)?,
        "seed": config.seed(),
        "summary": summary,
    });
    Ok(RunOutput { primary, meta, fit })
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes the primary file with `.meta.json` (and `.fit.json`) sidecars,
/// or the primary to stdout and the rest to stderr.
pub fn emit(out: &RunOutput, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => {
            write(path, &out.primary)?;
            write(&sidecar(path, ".meta.json"), &pretty(&out.meta))?;
            if let Some(fit) = &out.fit {
                write(&sidecar(path, ".fit.json"), &pretty(fit))?;
            }
        }
        None => {
            print!("{}", out.primary);
            eprint!("{}", pretty(&out.meta));
        }
    }
    Ok(())
}

pub fn trace_problem(c: &TraceConfig) -> Result<(ProblemSpec, NoiseParams), CliError> {
    if c.q != 0.0 && c.target_noisy {
        return Err(CliError::Config(
            "`q` sets a separate target rate and cannot be combined with `target_noisy`".into(),
        ));
    }
    let spec = ProblemSpec::new(c.n, c.k, c.kind.into(), c.target_noisy)?;
    let noise = if c.q != 0.0 {
        NoiseParams::with_target_rate(&spec, c.p, c.q)?
    } else {
        NoiseParams::for_problem(&spec, c.p)?
    };
    Ok((spec, noise))
}

fn full_noise(spec: &ProblemSpec, c: &TraceConfig) -> Result<NoiseConfig, CliError> {
    let config = NoiseConfig::for_problem(spec, c.p)?;
    Ok(if c.q != 0.0 { config.with_target_rate(c.q)? } else { config })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

type Outcome = (String, Value, Option<Value>);

fn run_trace(c: &TraceConfig, full: bool, ctx: &RunContext) -> Result<Outcome, CliError> {
    let (spec, noise) = trace_problem(c)?;
    let mut columns = Vec::new();
    if full {
        let sim = FullSimulator::with_cap(ctx.max_full_n);
        let trace = sim.evolve(c.n, &full_noise(&spec, c)?, c.steps)?;
        columns.push(Column { name: "p_full", values: trace.success });
    }
    let reduced = evolve(&spec, &noise, c.steps)?;
    columns.push(Column { name: "p_reduced", values: reduced.success });

    let mut analytic_info = Value::Null;
    if let Some(first) = approx_for(&spec, &noise, 0)? {
        let values = (0..=c.steps)
            .map(|m| approx_for(&spec, &noise, m).map(|r| r.map_or(f64::NAN, |r| r.value)))
            .collect::<Result<Vec<_>, _>>()?;
        analytic_info = json!({
            "in_region": first.validity.in_region(),
            "constraint": first.constraint_note,
        });
        columns.push(Column { name: "p_analytic", values });
    }
    let csv = trace_csv(&columns)?;

    let column = |name: &str| columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice());
    let mut deviations = serde_json::Map::new();
    if let (Some(f), Some(r)) = (column("p_full"), column("p_reduced")) {
        deviations.insert("full_vs_reduced".into(), json!(finite(max_diff(f, r))?));
    }
    if let Some(a) = column("p_analytic") {
        let reference = column("p_full").or(column("p_reduced")).expect("reduced column present");
        deviations.insert("analytic_vs_exact".into(), json!(finite(max_diff(a, reference))?));
    }
    let summary = json!({
        "basis": spec.basis_kind().name(),
        "dim": spec.dim(),
        "noise": { "p": noise.p, "q": noise.q, "s": noise.s, "w": noise.w },
        "m0": optimal_steps(c.n).real,
        "analytic": analytic_info,
        "max_abs_deviation": deviations,
    });
    Ok((csv, summary, None))
}

macro_rules! complex_pairs {
    ($z:expr) => {
        $z.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()
    };
}

fn run_spectrum(c: &SpectrumConfig) -> Result<Outcome, CliError> {
    let report = verify_perturbation(c.n, c.p, c.q)?;
    if report.eigenvalues.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Numerical("non-finite eigenvalue".into()));
    }
    let summary = json!({
        "max_abs_error": finite(report.max_abs_error)?,
        "max_perturbed_error": finite(report.max_perturbed_error())?,
        "spectral_radius": finite(report.spectral_radius())?,
    });
    let body = json!({
        "n": c.n,
        "p": c.p,
        "q": c.q,
        "eigenvalues": complex_pairs!(report.eigenvalues),
        "predicted": complex_pairs!(report.predicted),
        "pairing": report.pairing,
        "errors": report.errors,
        "max_abs_error": report.max_abs_error,
        "max_perturbed_error": report.max_perturbed_error(),
        "spectral_radius": report.spectral_radius(),
    });
    Ok((pretty(&body), summary, None))
}

pub fn grid_config(c: &ScalingConfig) -> Result<GridConfig, CliError> {
    let k_rule = match (c.k, c.mu) {
        (Some(_), Some(_)) => return Err(CliError::Config("`k` and `mu` are mutually exclusive".into())),
        (Some(k), None) => KRule::Fixed(k),
        (None, Some(mu)) => KRule::Power(mu),
        (None, None) => KRule::Fixed(0),
    };
    Ok(GridConfig {
        n_values: parse_grid(&c.grid)?,
        k_rule,
        p: c.p,
        q: c.q,
        kind: c.kind.into(),
        mode: c.mode.into(),
        window_factor: c.window,
    })
}

/// Grid points in parallel, then the canonical order.
pub fn parallel_scan(config: &GridConfig) -> Vec<ScalingRecord> {
    let mut records: Vec<ScalingRecord> = config.n_values.par_iter().map(|&n| scaling_point(config, n)).collect();
    sort_records(&mut records);
    records
}

pub fn scaling_csv(records: &[ScalingRecord]) -> String {
    let mut out = String::from("N,k,p,q,kind,mode,m_used,mbar\n");
    for r in records {
        let k = r.noisy_count.map(|k| k.to_string()).unwrap_or_default();
        let (m_used, mbar) = match &r.outcome {
            Ok(cost) => (cost.m_used.to_string(), format_float(cost.mbar)),
            Err(_) => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{k},{},{},{},{},{m_used},{mbar}\n",
            r.n_elements,
            format_float(r.p),
            format_float(r.q),
            r.kind.as_str(),
            r.mode.as_str(),
        ));
    }
    out
}

fn run_scaling(c: &ScalingConfig) -> Result<Outcome, CliError> {
    let config = grid_config(c)?;
    let records = parallel_scan(&config);
    let failures: Vec<Value> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| json!({ "N": r.n_elements, "error": e.to_string() })))
        .collect();
    let fit = match fit_exponent(&records) {
        Ok(f) => json!({
            "beta": f.beta,
            "intercept": f.intercept,
            "stderr": f.stderr,
            "n_min": f.n_range.0,
            "n_max": f.n_range.1,
            "points": f.points,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = json!({
        "points": records.len(),
        "failures": failures,
        "fit": fit,
    });
    Ok((scaling_csv(&records), summary, Some(fit)))
}

pub fn walk_spec(c: &WalkConfig) -> Result<StarWalkSpec, CliError> {
    let density = c.density.to_density()?;
    let spec = match &c.faulty {
        Some(_) if c.k != 0 => {
            return Err(CliError::Config("`faulty` lists the faulty spokes and excludes `k`".into()))
        }
        Some(faulty) => StarWalkSpec::new(c.n, faulty, density)?,
        None => StarWalkSpec::with_first_faulty(c.n, c.k, density)?,
    };
    Ok(spec)
}

fn run_walk(c: &WalkConfig, ctx: &RunContext) -> Result<Outcome, CliError> {
    let spec = walk_spec(c)?;
    let averaged = simulate_walk_averaged_with_cap(&spec, c.steps, ctx.max_full_n)?;
    let (problem, noise) = map_walk_to_grover(&spec)?;
    let mapped = evolve(&problem, &noise, c.steps)?;
    let mut summary = json!({
        "dephasing_rate": noise.p,
        "averaged_factor": averaged_dephasing_factor(spec.density())?,
        "max_abs_deviation": { "full_vs_reduced": finite(max_diff(&averaged.success, &mapped.success))? },
    });
    let mut columns = vec![
        Column { name: "p_full", values: averaged.success.clone() },
        Column { name: "p_reduced", values: mapped.success },
    ];
    if c.shots > 0 {
        let shots = (0..c.shots as u64)
            .into_par_iter()
            .map(|shot| walk_shot(&spec, c.steps, c.seed, shot))
            .collect::<Result<Vec<_>, _>>()?;
        let mc = aggregate_shots(&shots)?;
        let stderr = mc.stderr.clone().unwrap_or_default();
        let max_z = mc
            .success
            .iter()
            .zip(&stderr)
            .zip(&averaged.success)
            .filter(|((_, se), _)| **se > 0.0)
            .map(|((x, se), exact)| (x - exact).abs() / se)
            .fold(0.0, f64::max);
        summary["max_standard_score"] = json!(max_z);
        columns.push(Column { name: "p_mc", values: mc.success });
        columns.push(Column { name: "stderr", values: stderr });
    }
    Ok((trace_csv(&columns)?, summary, None))
}
