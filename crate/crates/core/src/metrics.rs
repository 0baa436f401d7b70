//! Expected number of oracle calls with restarts, optimal stopping and
//! scaling exponents over geometric grids of `N`.
//!
//! A run of `m` steps succeeds with probability `p_suc(m)`; repeating until
//! success costs `m̄(m) = (m + 1) / p_suc(m)` steps on average.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;

use crate::analytics::optimal_steps;
use crate::error::{check_rate, Error, Result};
use crate::reduced::{evolve, NoiseKind, NoiseParams, ProblemSpec};
use crate::trace::EvolutionTrace;

/// Success probabilities at or below this are treated as unusable.
pub const USABLE_FLOOR: f64 = 1e-12;

/// Default length of the minimization window in units of `m₀`.
pub const DEFAULT_WINDOW_FACTOR: f64 = 4.0;

pub fn expected_steps(p_suc: f64, m: usize) -> Result<f64> {
    if !(p_suc > USABLE_FLOOR) || p_suc > 1.0 + 1e-12 {
        return Err(Error::Unusable(p_suc));
    }
    Ok((m + 1) as f64 / p_suc)
}

/// `m̄(m)` for every `m ≥ 1` of a trace; `None` marks unusable points.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve {
    pub points: Vec<(usize, Option<f64>)>,
}

impl CostCurve {
    pub fn from_trace(trace: &EvolutionTrace) -> Self {
        let points = trace.points().skip(1).map(|(m, p)| (m, expected_steps(p, m).ok())).collect();
        Self { points }
    }

    /// Minimizing `(m, m̄)`, smallest `m` on ties.
    pub fn minimum(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for &(m, cost) in &self.points {
            if let Some(c) = cost {
                if best.is_none_or(|(_, b)| c < b) {
                    best = Some((m, c));
                }
            }
        }
        best
    }
}

/// Optimal `(m*, m̄*)` over `m = 1..=trace.steps()`.
pub fn optimal_expected_steps(trace: &EvolutionTrace) -> Result<(usize, f64)> {
    CostCurve::from_trace(trace).minimum().ok_or_else(|| {
        let best = trace.success.iter().skip(1).copied().fold(0.0, f64::max);
        Error::Unusable(best)
    })
}

/// How the number of steps per run is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StoppingMode {
    /// Every run lasts `round(m₀)` steps.
    FixedM0,
    /// `m` minimizing `m̄` within `1..=ceil(window · m₀)`.
    Minimized,
}

impl StoppingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StoppingMode::FixedM0 => "fixed_m0",
            StoppingMode::Minimized => "minimized",
        }
    }
}

/// Number of noisy normal elements as a function of `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KRule {
    Fixed(usize),
    /// `k = ceil(N^μ)`, capped at `N - 1`.
    Power(f64),
}

impl KRule {
    pub fn k_for(self, n: usize) -> Result<usize> {
        let k = match self {
            KRule::Fixed(k) => k,
            KRule::Power(mu) => {
                if !(0.0..=1.0).contains(&mu) {
                    return Err(Error::InvalidParameter { field: "mu", reason: "exponent must lie in [0, 1]" });
                }
                ((n as f64).powf(mu) - 1e-9).ceil() as usize
            }
        };
        Ok(k.min(n.saturating_sub(1)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_values: Vec<usize>,
    pub k_rule: KRule,
    /// Rate on the noisy normal elements.
    pub p: f64,
    /// Rate on the target.
    pub q: f64,
    pub kind: NoiseKind,
    pub mode: StoppingMode,
    pub window_factor: f64,
}

impl GridConfig {
    /// `N = 2^6, ..., 2^16`, noiseless, fixed `m₀`.
    pub fn default_grid() -> Vec<usize> {
        (6..=16).map(|i| 1usize << i).collect()
    }

    pub fn new(k_rule: KRule, p: f64, q: f64, kind: NoiseKind, mode: StoppingMode) -> Self {
        Self { n_values: Self::default_grid(), k_rule, p, q, kind, mode, window_factor: DEFAULT_WINDOW_FACTOR }
    }

    fn problem(&self, n: usize) -> Result<(ProblemSpec, NoiseParams)> {
        let k = self.k_rule.k_for(n)?;
        let spec = ProblemSpec::new(n, k, self.kind, self.q > 0.0)?;
        let noise = NoiseParams::with_target_rate(&spec, self.p, self.q)?;
        Ok((spec, noise))
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::new(KRule::Fixed(0), 0.0, 0.0, NoiseKind::Decoupled, StoppingMode::FixedM0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub m_used: usize,
    pub mbar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRecord {
    pub n_elements: usize,
    /// `None` when the k rule itself failed.
    pub noisy_count: Option<usize>,
    pub p: f64,
    pub q: f64,
    pub kind: NoiseKind,
    pub mode: StoppingMode,
    pub outcome: core::result::Result<Cost, Error>,
}

fn cost_at(config: &GridConfig, n: usize) -> Result<Cost> {
    check_rate("p", config.p)?;
    check_rate("q", config.q)?;
    let (spec, noise) = config.problem(n)?;
    let m0 = optimal_steps(n);
    match config.mode {
        StoppingMode::FixedM0 => {
            let m = m0.rounded.max(1);
            let trace = evolve(&spec, &noise, m)?;
            let mbar = expected_steps(trace.at(m).expect("m steps evolved"), m)?;
            Ok(Cost { m_used: m, mbar })
        }
        StoppingMode::Minimized => {
            if !(config.window_factor > 0.0) {
                return Err(Error::InvalidParameter { field: "window_factor", reason: "must be positive" });
            }
            let window = ((config.window_factor * m0.real).ceil() as usize).max(m0.rounded).max(1);
            let trace = evolve(&spec, &noise, window)?;
            let (m_used, mbar) = optimal_expected_steps(&trace)?;
            Ok(Cost { m_used, mbar })
        }
    }
}

/// The record for one grid point. Failures are kept in `outcome`.
pub fn scaling_point(config: &GridConfig, n: usize) -> ScalingRecord {
    ScalingRecord {
        n_elements: n,
        noisy_count: config.k_rule.k_for(n).ok(),
        p: config.p,
        q: config.q,
        kind: config.kind,
        mode: config.mode,
        outcome: cost_at(config, n),
    }
}

/// Canonical output order: by `N`, then `k`, rates, kind and mode.
pub fn sort_records(records: &mut [ScalingRecord]) {
    records.sort_by(|a, b| {
        a.n_elements
            .cmp(&b.n_elements)
            .then(a.noisy_count.cmp(&b.noisy_count))
            .then(a.p.total_cmp(&b.p))
            .then(a.q.total_cmp(&b.q))
            .then((a.kind as u8).cmp(&(b.kind as u8)))
            .then(a.mode.cmp(&b.mode))
    });
}

pub fn scaling_scan(config: &GridConfig) -> Vec<ScalingRecord> {
    let mut records: Vec<ScalingRecord> = config.n_values.iter().map(|&n| scaling_point(config, n)).collect();
    sort_records(&mut records);
    records
}

/// Least-squares slope of `log m̄` against `log N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub beta: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub n_range: (usize, usize),
    pub points: usize,
}

/// Ordinary least squares on `(log x, log y)`. Needs three or more points
/// with positive coordinates and at least two distinct `x`.
pub fn fit_power_law(data: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if data.len() < 3 {
        return Err(Error::InvalidParameter { field: "records", reason: "need at least 3 usable points" });
    }
    if data.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InvalidParameter { field: "records", reason: "values must be positive and finite" });
    }
    let len = data.len() as f64;
    let logs: Vec<(f64, f64)> = data.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / len;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter { field: "records", reason: "need at least two distinct N" });
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (len - 2.0) / sxx).sqrt();
    Ok((slope, intercept, stderr))
}

/// Fits `m̄ ∝ N^β` over the successful records.
pub fn fit_exponent(records: &[ScalingRecord]) -> Result<ExponentFit> {
    let usable: Vec<(usize, f64)> =
        records.iter().filter_map(|r| r.outcome.as_ref().ok().map(|c| (r.n_elements, c.mbar))).collect();
    let data: Vec<(f64, f64)> = usable.iter().map(|(n, c)| (*n as f64, *c)).collect();
    let (beta, intercept, stderr) = fit_power_law(&data)?;
    let n_min = usable.iter().map(|u| u.0).min().expect("non-empty");
    let n_max = usable.iter().map(|u| u.0).max().expect("non-empty");
    Ok(ExponentFit { beta, intercept, stderr, n_range: (n_min, n_max), points: usable.len() })
}
