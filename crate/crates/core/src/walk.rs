//! Quantum-walk search on a star graph whose faulty spokes pick up random
//! phases, and its mapping onto Grover search with decoupled dephasing.
//!
//! Edge states: the outgoing state `|0,j⟩` sits at index `j-1` and the
//! incoming state `|j,0⟩` at index `N+j-1`, for spokes `j = 1..=N`. Spoke 1
//! is the target. One walk step applies the phases to the outgoing states of
//! faulty spokes and then the walk unitary, which reflects `|0,j⟩` back as
//! `|j,0⟩` (with a sign flip on the target) and scatters `|j,0⟩` over
//! `Σ_y G_yj |0,y⟩`. Two walk steps make one Grover step.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{check_rate, Error, Result};
use crate::full::DEFAULT_MAX_N;
use crate::reduced::{NoiseKind, NoiseParams, ProblemSpec};
use crate::trace::EvolutionTrace;

const DENSITY_TOL: f64 = 1e-9;

/// Distribution of the random phase on a faulty spoke. Always symmetric
/// around zero.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseDensity {
    /// Uniform on `[-a, a]`, `0 < a ≤ π`.
    Uniform(f64),
    /// `±φ₀` with probability 1/2 each.
    PointMass(f64),
    /// Tabulated density on a uniform grid over `[-a, a]`, interpolated
    /// linearly between grid points.
    Custom(TabulatedDensity),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    a: f64,
    values: Vec<f64>,
    /// Cumulative mass of the interpolant at every grid point.
    cdf: Vec<f64>,
}

impl TabulatedDensity {
    /// `values[i]` is the density at `-a + 2a·i/(len-1)`. Needs an odd number
    /// of points (Simpson rule), symmetry and unit mass.
    pub fn new(a: f64, values: Vec<f64>) -> Result<Self> {
        if !(a > 0.0 && a <= PI) {
            return Err(Error::InvalidDensity("support half-width must lie in (0, pi]"));
        }
        if values.len() < 3 || values.len().is_multiple_of(2) {
            return Err(Error::InvalidDensity("tabulation needs an odd number of at least 3 points"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDensity("density values must be finite and non-negative"));
        }
        let scale = values.iter().copied().fold(0.0, f64::max).max(1.0);
        let symmetric = values.iter().zip(values.iter().rev()).all(|(x, y)| (x - y).abs() <= DENSITY_TOL * scale);
        if !symmetric {
            return Err(Error::AsymmetricDensity);
        }
        let h = 2.0 * a / (values.len() - 1) as f64;
        if (simpson(&values, h) - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity("density must integrate to 1"));
        }
        let mut cdf = Vec::with_capacity(values.len());
        cdf.push(0.0);
        for w in values.windows(2) {
            let last = *cdf.last().expect("non-empty");
            cdf.push(last + 0.5 * h * (w[0] + w[1]));
        }
        Ok(Self { a, values, cdf })
    }

    /// Like [`TabulatedDensity::new`] after rescaling `values` to unit mass.
    pub fn normalized(a: f64, mut values: Vec<f64>) -> Result<Self> {
        if values.len() >= 3 && values.len() % 2 == 1 && a > 0.0 {
            let h = 2.0 * a / (values.len() - 1) as f64;
            let mass = simpson(&values, h);
            if mass > 0.0 && mass.is_finite() {
                values.iter_mut().for_each(|v| *v /= mass);
            }
        }
        Self::new(a, values)
    }

    pub fn half_width(&self) -> f64 {
        self.a
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn step(&self) -> f64 {
        2.0 * self.a / (self.values.len() - 1) as f64
    }

    fn grid(&self, i: usize) -> f64 {
        -self.a + self.step() * i as f64
    }

    /// Inverse CDF of the piecewise-linear interpolant.
    fn quantile(&self, u: f64) -> f64 {
        let total = *self.cdf.last().expect("non-empty");
        let target = u * total;
        let cell = match self.cdf.iter().position(|c| *c > target) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.values.len() - 2,
        };
        let h = self.step();
        let (f0, f1) = (self.values[cell], self.values[cell + 1]);
        let mass = (target - self.cdf[cell]).max(0.0);
        let slope = (f1 - f0) / h;
        let s = if slope.abs() <= 1e-14 * (f0 + f1).max(1.0) {
            if f0 > 0.0 {
                mass / f0
            } else {
                0.5 * h
            }
        } else {
            (-f0 + (f0 * f0 + 2.0 * slope * mass).max(0.0).sqrt()) / slope
        };
        self.grid(cell) + s.clamp(0.0, h)
    }
}

/// Composite Simpson rule on equally spaced samples (odd count).
fn simpson(values: &[f64], h: f64) -> f64 {
    let last = values.len() - 1;
    let inner: f64 = values[1..last]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    h / 3.0 * (values[0] + inner + values[last])
}

impl PhaseDensity {
    fn validate(&self) -> Result<()> {
        match self {
            PhaseDensity::Uniform(a) if !(*a > 0.0 && *a <= PI) => {
                Err(Error::InvalidDensity("uniform half-width must lie in (0, pi]"))
            }
            PhaseDensity::PointMass(phi) if !phi.is_finite() => Err(Error::InvalidDensity("phase must be finite")),
            _ => Ok(()),
        }
    }

    /// Draws one phase from `u ∈ [0, 1)`.
    fn sample(&self, u: f64) -> f64 {
        match self {
            PhaseDensity::Uniform(a) => a * (2.0 * u - 1.0),
            PhaseDensity::PointMass(phi) => {
                if u < 0.5 {
                    -phi
                } else {
                    *phi
                }
            }
            PhaseDensity::Custom(table) => table.quantile(u),
        }
    }
}

/// Rate `p` with `1 - p = ∫ π(φ) cos φ dφ`, the damping of a coherence
/// between a faulty outgoing edge and any other edge.
pub fn averaged_dephasing_factor(density: &PhaseDensity) -> Result<f64> {
    density.validate()?;
    let one_minus_p = match density {
        PhaseDensity::Uniform(a) => a.sin() / a,
        PhaseDensity::PointMass(phi) => phi.cos(),
        PhaseDensity::Custom(table) => {
            let weighted: Vec<f64> =
                table.values.iter().enumerate().map(|(i, v)| v * table.grid(i).cos()).collect();
            simpson(&weighted, table.step())
        }
    };
    // round-off can push exact cases a hair outside [0, 1]
    let p = 1.0 - one_minus_p;
    let p = if p < 0.0 && p > -1e-15 { 0.0 } else { p };
    check_rate("p", p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarWalkSpec {
    spokes: usize,
    faulty: Vec<usize>,
    density: PhaseDensity,
}

impl StarWalkSpec {
    /// `faulty` lists spoke labels in `2..=spokes`; the target spoke 1 and
    /// the center 0 cannot be faulty.
    pub fn new(spokes: usize, faulty: &[usize], density: PhaseDensity) -> Result<Self> {
        if spokes < 4 {
            return Err(Error::InvalidParameter { field: "spokes", reason: "need at least 4 spokes" });
        }
        density.validate()?;
        let mut faulty = faulty.to_vec();
        faulty.sort_unstable();
        faulty.dedup();
        if faulty.iter().any(|&j| j < 2 || j > spokes) {
            return Err(Error::InvalidParameter { field: "faulty", reason: "faulty spokes must lie in 2..=N" });
        }
        Ok(Self { spokes, faulty, density })
    }

    /// Spokes `2..=k+1` faulty.
    pub fn with_first_faulty(spokes: usize, k: usize, density: PhaseDensity) -> Result<Self> {
        if k >= spokes {
            return Err(Error::InvalidParameter { field: "k", reason: "at most N-1 spokes can be faulty" });
        }
        let faulty: Vec<usize> = (2..k + 2).collect();
        Self::new(spokes, &faulty, density)
    }

    pub fn spokes(&self) -> usize {
        self.spokes
    }

    pub fn faulty(&self) -> &[usize] {
        &self.faulty
    }

    pub fn density(&self) -> &PhaseDensity {
        &self.density
    }

    fn faulty_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.spokes];
        for &j in &self.faulty {
            mask[j - 1] = true;
        }
        mask
    }

    fn check_cap(&self, max_n: usize) -> Result<()> {
        if self.spokes > max_n {
            Err(Error::ResourceCap { n: self.spokes, cap: max_n })
        } else {
            Ok(())
        }
    }
}

/// The equivalent Grover problem: `N` elements, `k` independently dephased
/// normal elements, clean target, rate from the phase density.
pub fn map_walk_to_grover(spec: &StarWalkSpec) -> Result<(ProblemSpec, NoiseParams)> {
    let p = averaged_dephasing_factor(&spec.density)?;
    let problem = ProblemSpec::new(spec.spokes, spec.faulty.len(), NoiseKind::Decoupled, false)?;
    let noise = NoiseParams::for_problem(&problem, p)?;
    Ok((problem, noise))
}

/// Real `2N x 2N` edge-state density matrix stored as four `N x N` blocks
/// (out/in by out/in).
#[derive(Debug, Clone, PartialEq)]
struct EdgeDensity {
    n: usize,
    oo: Vec<f64>,
    oi: Vec<f64>,
    io: Vec<f64>,
    ii: Vec<f64>,
}

impl EdgeDensity {
    fn initial(n: usize) -> Self {
        Self {
            n,
            oo: vec![1.0 / n as f64; n * n],
            oi: vec![0.0; n * n],
            io: vec![0.0; n * n],
            ii: vec![0.0; n * n],
        }
    }

    fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.oo[i * self.n + i] + self.ii[i * self.n + i]).sum()
    }

    fn target_out(&self) -> f64 {
        self.oo[0]
    }

    /// Averaged phase noise: factor `(1-p)` per faulty outgoing index on
    /// every off-diagonal entry.
    fn dephase(&mut self, faulty: &[bool], keep: f64) {
        let n = self.n;
        let f = |i: usize| if faulty[i] { keep } else { 1.0 };
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    self.oo[i * n + j] *= f(i) * f(j);
                }
                self.oi[i * n + j] *= f(i);
                self.io[i * n + j] *= f(j);
            }
        }
    }

    /// `ρ ↦ U ρ Uᵀ` in `O(N²)`.
    fn apply_unitary(&mut self) {
        let n = self.n;
        let t = 2.0 / n as f64;
        // out' = G in, in' = S out with S = diag(-1, 1, ..., 1)
        let mut oo = core::mem::take(&mut self.ii);
        grover_sandwich(&mut oo, n, t);
        let mut oi = core::mem::take(&mut self.io);
        g_left(&mut oi, n, t);
        negate_col0(&mut oi, n);
        let mut io = core::mem::take(&mut self.oi);
        negate_row0(&mut io, n);
        g_right(&mut io, n, t);
        let mut ii = core::mem::take(&mut self.oo);
        negate_row0(&mut ii, n);
        negate_col0(&mut ii, n);
        *self = Self { n, oo, oi, io, ii };
    }
}

fn g_left(m: &mut [f64], n: usize, t: f64) {
    let mut col_sums = vec![0.0; n];
    for row in m.chunks_exact(n) {
        for (s, x) in col_sums.iter_mut().zip(row) {
            *s += x;
        }
    }
    for row in m.chunks_exact_mut(n) {
        for (x, s) in row.iter_mut().zip(&col_sums) {
            *x = t * s - *x;
        }
    }
}

fn g_right(m: &mut [f64], n: usize, t: f64) {
    for row in m.chunks_exact_mut(n) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x = t * s - *x);
    }
}

fn grover_sandwich(m: &mut [f64], n: usize, t: f64) {
    g_left(m, n, t);
    g_right(m, n, t);
}

fn negate_row0(m: &mut [f64], n: usize) {
    m[..n].iter_mut().for_each(|x| *x = -*x);
}

fn negate_col0(m: &mut [f64], n: usize) {
    m.chunks_exact_mut(n).for_each(|row| row[0] = -row[0]);
}

/// Averaged-channel walk, target outgoing-edge probability after every
/// second walk step, `m = 0..=grover_steps`.
pub fn simulate_walk_averaged(spec: &StarWalkSpec, grover_steps: usize) -> Result<EvolutionTrace> {
    simulate_walk_averaged_with_cap(spec, grover_steps, DEFAULT_MAX_N)
}

pub fn simulate_walk_averaged_with_cap(spec: &StarWalkSpec, grover_steps: usize, max_n: usize) -> Result<EvolutionTrace> {
    spec.check_cap(max_n)?;
    let keep = 1.0 - averaged_dephasing_factor(&spec.density)?;
    let faulty = spec.faulty_mask();
    let mut rho = EdgeDensity::initial(spec.spokes);
    let mut success = Vec::with_capacity(grover_steps + 1);
    success.push(rho.target_out());
    for _ in 0..grover_steps {
        for _ in 0..2 {
            rho.dephase(&faulty, keep);
            rho.apply_unitary();
        }
        debug_assert!((rho.trace() - 1.0).abs() < 1e-9);
        success.push(rho.target_out());
    }
    Ok(EvolutionTrace::new(success))
}

/// Uniform draw in `[0, 1)` with 53 random bits.
fn unit_interval(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn apply_phases(psi: &mut [Complex64], faulty: &[usize], phases: &[f64]) {
    for (&j, &phi) in faulty.iter().zip(phases) {
        psi[j - 1] *= Complex64::from_polar(1.0, phi);
    }
}

fn apply_walk_unitary(psi: &mut [Complex64]) {
    let n = psi.len() / 2;
    let t = 2.0 / n as f64;
    let (out, inc) = psi.split_at_mut(n);
    let sum: Complex64 = inc.iter().sum();
    for (o, i) in out.iter_mut().zip(inc.iter_mut()) {
        let reflected = *o;
        *o = sum * t - *i;
        *i = reflected;
    }
    inc[0] = -inc[0];
}

/// Target probabilities of one Monte Carlo trajectory. The generator is
/// ChaCha8 seeded with `seed` on stream `shot`, so each shot is
/// reproducible on its own.
pub fn walk_shot(spec: &StarWalkSpec, grover_steps: usize, seed: u64, shot: u64) -> Result<Vec<f64>> {
    let n = spec.spokes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); 2 * n];
    psi[..n].iter_mut().for_each(|x| *x = amp);
    let mut phases = vec![0.0; spec.faulty.len()];
    let mut out = Vec::with_capacity(grover_steps + 1);
    out.push(psi[0].norm_sqr());
    for _ in 0..grover_steps {
        for _ in 0..2 {
            phases.iter_mut().for_each(|phi| *phi = spec.density.sample(unit_interval(&mut rng)));
            apply_phases(&mut psi, &spec.faulty, &phases);
            apply_walk_unitary(&mut psi);
        }
        out.push(psi[0].norm_sqr());
    }
    Ok(out)
}

/// Mean and standard error across shots, per recorded step.
pub fn aggregate_shots(shots: &[Vec<f64>]) -> Result<EvolutionTrace> {
    let count = shots.len();
    let Some(first) = shots.first() else {
        return Err(Error::InvalidParameter { field: "shots", reason: "need at least one shot" });
    };
    if let Some(bad) = shots.iter().find(|s| s.len() != first.len()) {
        return Err(Error::DimensionMismatch { expected: first.len(), found: bad.len() });
    }
    let mut mean = Vec::with_capacity(first.len());
    let mut stderr = Vec::with_capacity(first.len());
    for m in 0..first.len() {
        let mu = shots.iter().map(|s| s[m]).sum::<f64>() / count as f64;
        let se = if count > 1 {
            let var = shots.iter().map(|s| (s[m] - mu) * (s[m] - mu)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        mean.push(mu);
        stderr.push(se);
    }
    Ok(EvolutionTrace { success: mean, stderr: Some(stderr) })
}

/// Pure-state trajectories with fresh phases per faulty spoke and walk
/// step, averaged over `shots`.
pub fn simulate_walk_montecarlo(spec: &StarWalkSpec, grover_steps: usize, shots: usize, seed: u64) -> Result<EvolutionTrace> {
    if shots == 0 {
        return Err(Error::InvalidParameter { field: "shots", reason: "need at least one shot" });
    }
    let runs = (0..shots as u64)
        .map(|shot| walk_shot(spec, grover_steps, seed, shot))
        .collect::<Result<Vec<_>>>()?;
    aggregate_shots(&runs)
}
