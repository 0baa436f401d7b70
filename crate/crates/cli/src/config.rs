//! Experiment configuration: a JSON document with a `command` tag, plus
//! command-line flags that override its fields.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use grover_dephasing::metrics::StoppingMode;
use grover_dephasing::walk::{PhaseDensity, TabulatedDensity};
use grover_dephasing::NoiseKind;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Coupled,
    Decoupled,
}

impl From<Kind> for NoiseKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Coupled => NoiseKind::Coupled,
            Kind::Decoupled => NoiseKind::Decoupled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FixedM0,
    Minimized,
}

impl From<Mode> for StoppingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FixedM0 => StoppingMode::FixedM0,
            Mode::Minimized => StoppingMode::Minimized,
        }
    }
}

fn decoupled() -> Kind {
    Kind::Decoupled
}

fn fixed_m0() -> Mode {
    Mode::FixedM0
}

fn default_grid() -> String {
    "2^6..2^16".to_owned()
}

fn default_window() -> f64 {
    grover_dephasing::metrics::DEFAULT_WINDOW_FACTOR
}

fn default_density() -> DensityConfig {
    DensityConfig::Uniform { a: 1.0 }
}

/// Database size, noise scenario and number of Grover steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "decoupled")]
    pub kind: Kind,
    /// Whether the target belongs to the noisy set (rate `p`).
    #[serde(default)]
    pub target_noisy: bool,
    #[serde(default)]
    pub p: f64,
    /// Separate dephasing rate on the target alone.
    #[serde(default)]
    pub q: f64,
    pub steps: usize,
    /// Also run the exact simulation (always on for `compare`).
    #[serde(default)]
    pub full: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub n: usize,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    /// `2^a..2^b` or a comma-separated list of sizes.
    #[serde(default = "default_grid")]
    pub grid: String,
    /// Fixed number of noisy normal elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// `k = ceil(N^mu)`; excludes `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default = "decoupled")]
    pub kind: Kind,
    #[serde(default = "fixed_m0")]
    pub mode: Mode,
    /// Minimization window in units of `m0`.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityConfig {
    Uniform { a: f64 },
    PointMass { phi: f64 },
    /// Values on a uniform grid over `[-a, a]`.
    Custom {
        a: f64,
        values: Vec<f64>,
        #[serde(default)]
        normalize: bool,
    },
}

impl DensityConfig {
    pub fn to_density(&self) -> Result<PhaseDensity, CliError> {
        Ok(match self {
            DensityConfig::Uniform { a } => PhaseDensity::Uniform(*a),
            DensityConfig::PointMass { phi } => PhaseDensity::PointMass(*phi),
            DensityConfig::Custom { a, values, normalize } => {
                let table = if *normalize {
                    TabulatedDensity::normalized(*a, values.clone())
                } else {
                    TabulatedDensity::new(*a, values.clone())
                };
                PhaseDensity::Custom(table?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    /// Number of spokes.
    pub n: usize,
    /// Spokes `2..=k+1` are faulty unless `faulty` lists them.
    #[serde(default)]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faulty: Option<Vec<usize>>,
    #[serde(default = "default_density")]
    pub density: DensityConfig,
    /// Grover steps; the walk runs twice as many.
    pub steps: usize,
    /// Monte Carlo shots; 0 skips the sampling.
    #[serde(default)]
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Simulate(TraceConfig),
    Compare(TraceConfig),
    Spectrum(SpectrumConfig),
    Scaling(ScalingConfig),
    Walk(WalkConfig),
}

impl ExperimentConfig {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Simulate(_) => "simulate",
            ExperimentConfig::Compare(_) => "compare",
            ExperimentConfig::Spectrum(_) => "spectrum",
            ExperimentConfig::Scaling(_) => "scaling",
            ExperimentConfig::Walk(_) => "walk",
        }
    }

    pub fn output(&self) -> Option<&Path> {
        match self {
            ExperimentConfig::Simulate(c) | ExperimentConfig::Compare(c) => c.output.as_deref(),
            ExperimentConfig::Spectrum(c) => c.output.as_deref(),
            ExperimentConfig::Scaling(c) => c.output.as_deref(),
            ExperimentConfig::Walk(c) => c.output.as_deref(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentConfig::Walk(c) => Some(c.seed),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }
}

/// Expands `2^a..2^b` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("invalid `grid` {spec:?}: use 2^a..2^b or a comma-separated list"));
    let spec = spec.trim();
    let values: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let exponent = |s: &str| -> Result<u32, CliError> {
            s.trim().strip_prefix("2^").and_then(|e| e.parse().ok()).ok_or_else(bad)
        };
        let (lo, hi) = (exponent(lo)?, exponent(hi)?);
        if lo > hi || hi >= usize::BITS - 1 {
            return Err(bad());
        }
        (lo..=hi).map(|i| 1usize << i).collect()
    } else {
        spec.split(',').map(|s| s.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

#[derive(Debug, Parser)]
#[command(name = "grover-dephasing", version, about = "Grover search under localized dephasing noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Success probability per step (reduced, closed form, optionally exact).
    Simulate(TraceArgs),
    /// Exact, reduced and closed-form curves side by side with deviations.
    Compare(TraceArgs),
    /// Eigenvalues of the four-dimensional step against first-order theory.
    Spectrum(SpectrumArgs),
    /// Expected cost over a grid of sizes and the fitted exponent.
    Scaling(ScalingArgs),
    /// Star-graph walk with phase-shifting spokes.
    Walk(WalkArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; a `.meta.json` sidecar is written next to it.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub target_noisy: Option<bool>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub full: Option<bool>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    Uniform,
    PointMass,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Faulty spokes, e.g. `2,5,9`.
    #[arg(long, value_delimiter = ',')]
    pub faulty: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub density: Option<DensityKind>,
    /// Half-width of the uniform density.
    #[arg(long)]
    pub a: Option<f64>,
    /// Phase of the point-mass density.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn set(map: &mut Map<String, Value>, key: &str, value: Option<impl Serialize>) {
    if let Some(v) = value {
        map.insert(key.to_owned(), serde_json::to_value(v).expect("flag values serialize"));
    }
}

fn walk_density(map: &mut Map<String, Value>, args: &WalkArgs) {
    if args.density.is_none() && args.a.is_none() && args.phi.is_none() {
        return;
    }
    let mut density = match map.remove("density") {
        Some(Value::Object(d)) => d,
        _ => serde_json::to_value(default_density()).ok().and_then(|v| v.as_object().cloned()).unwrap_or_default(),
    };
    if let Some(kind) = args.density {
        let name = match kind {
            DensityKind::Uniform => "uniform",
            DensityKind::PointMass => "point_mass",
        };
        if density.get("type").and_then(Value::as_str) != Some(name) {
            density.clear();
            density.insert("type".into(), json!(name));
            if kind == DensityKind::Uniform && args.a.is_none() {
                density.insert("a".into(), json!(1.0));
            }
        }
    }
    set(&mut density, "a", args.a);
    set(&mut density, "phi", args.phi);
    map.insert("density".into(), Value::Object(density));
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Compare(_) => "compare",
            Command::Spectrum(_) => "spectrum",
            Command::Scaling(_) => "scaling",
            Command::Walk(_) => "walk",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(a) | Command::Compare(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Scaling(a) => &a.common,
            Command::Walk(a) => &a.common,
        }
    }

    fn apply_flags(&self, map: &mut Map<String, Value>) {
        set(map, "output", self.common().output.as_ref());
        match self {
            Command::Simulate(a) | Command::Compare(a) => {
                set(map, "n", a.n);
                set(map, "k", a.k);
                set(map, "kind", a.kind);
                set(map, "target_noisy", a.target_noisy);
                set(map, "p", a.p);
                set(map, "q", a.q);
                set(map, "steps", a.steps);
                set(map, "full", a.full);
            }
            Command::Spectrum(a) => {
                set(map, "n", a.n);
                set(map, "p", a.p);
                set(map, "q", a.q);
            }
            Command::Scaling(a) => {
                set(map, "grid", a.grid.as_ref());
                // a flag for one k rule replaces the other from the file
                if a.k.is_some() {
                    map.remove("mu");
                }
                if a.mu.is_some() {
                    map.remove("k");
                }
                set(map, "k", a.k);
                set(map, "mu", a.mu);
                set(map, "p", a.p);
                set(map, "q", a.q);
                set(map, "kind", a.kind);
                set(map, "mode", a.mode);
                set(map, "window", a.window);
            }
            Command::Walk(a) => {
                set(map, "n", a.n);
                set(map, "k", a.k);
                set(map, "faulty", a.faulty.as_ref());
                walk_density(map, a);
                set(map, "steps", a.steps);
                set(map, "shots", a.shots);
                set(map, "seed", a.seed);
            }
        }
    }

    /// The configuration file (if any) with this command's flags applied.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut map = match &self.common().config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read `config` file {}: {e}", path.display())))?;
                match serde_json::from_str::<Value>(&text)? {
                    Value::Object(map) => map,
                    _ => return Err(CliError::Config("the configuration must be a JSON object".into())),
                }
            }
            None => Map::new(),
        };
        match map.get("command") {
            None => {
                map.insert("command".into(), json!(self.name()));
            }
            Some(Value::String(c)) if c == self.name() => {}
            Some(other) => {
                return Err(CliError::Config(format!(
                    "`command` in the configuration is {other}, but the subcommand is {:?}",
                    self.name()
                )))
            }
        }
        self.apply_flags(&mut map);
        Ok(serde_json::from_value(Value::Object(map))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig, CliError> {
        let mut full = vec!["grover-dephasing"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().command.resolve()
    }

    #[test]
    fn flags_only() {
        let c = parse(&["simulate", "--n", "500", "--k", "10", "--kind", "coupled", "--p", "0.1", "--steps", "100"]).unwrap();
        let ExperimentConfig::Simulate(c) = c else { panic!() };
        assert_eq!((c.n, c.k, c.kind, c.p, c.steps, c.full), (500, 10, Kind::Coupled, 0.1, 100, false));
    }

    #[test]
    fn missing_field_is_named() {
        let err = parse(&["simulate", "--n", "500"]).unwrap_err();
        assert!(err.to_string().contains("steps"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command":"scaling","mu":0.7,"p":0.1,"mode":"minimized"}"#).unwrap();
        let c = parse(&["scaling", "--config", path.to_str().unwrap(), "--k", "3", "--p", "0.2"]).unwrap();
        let ExperimentConfig::Scaling(c) = c else { panic!() };
        assert_eq!((c.k, c.mu, c.p, c.mode), (Some(3), None, 0.2, Mode::Minimized));
        assert_eq!(c.grid, "2^6..2^16");
    }

    #[test]
    fn unknown_keys_and_mismatched_command_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command":"spectrum","n":100,"rate":0.1}"#).unwrap();
        let err = parse(&["spectrum", "--config", path.to_str().unwrap()]).unwrap_err();
        assert!(err.to_string().contains("rate"), "{err}");
        std::fs::write(&path, r#"{"command":"walk","n":100,"steps":3}"#).unwrap();
        assert!(parse(&["spectrum", "--config", path.to_str().unwrap()]).is_err());
    }

    #[test]
    fn walk_density_flags() {
        let c = parse(&["walk", "--n", "20", "--steps", "4", "--density", "point-mass", "--phi", "0.3"]).unwrap();
        let ExperimentConfig::Walk(c) = c else { panic!() };
        assert_eq!(c.density, DensityConfig::PointMass { phi: 0.3 });
        let c = parse(&["walk", "--n", "20", "--steps", "4", "--a", "0.5"]).unwrap();
        let ExperimentConfig::Walk(c) = c else { panic!() };
        assert_eq!(c.density, DensityConfig::Uniform { a: 0.5 });
    }

    #[test]
    fn boolean_flags() {
        let c = parse(&["compare", "--n", "8", "--steps", "2", "--target-noisy"]).unwrap();
        let ExperimentConfig::Compare(c) = c else { panic!() };
        assert!(c.target_noisy);
        let c = parse(&["compare", "--n", "8", "--steps", "2", "--target-noisy", "false"]).unwrap();
        let ExperimentConfig::Compare(c) = c else { panic!() };
        assert!(!c.target_noisy);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("2^6..2^8").unwrap(), vec![64, 128, 256]);
        assert_eq!(parse_grid("10, 20,40").unwrap(), vec![10, 20, 40]);
        assert!(parse_grid("2^8..2^6").is_err());
        assert!(parse_grid("64..128").is_err());
        assert!(parse_grid("").is_err());
    }
}
