//! Exact `N x N` density-matrix simulation of noisy Grover evolution.
//!
//! This is the brute-force reference for [`crate::reduced`]. Indices are
//! zero-based here: the target is element `0`, noisy normal elements are
//! `1..=k` and clean normal elements are `k+1..N`. All matrices are real.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;

use crate::error::{check_rate, Error, Result};
use crate::linalg::Matrix;
use crate::reduced::{BasisKind, NoiseKind, ProblemSpec, SigmaState};
use crate::trace::EvolutionTrace;

/// Largest `N` simulated unless the caller raises the cap.
pub const DEFAULT_MAX_N: usize = 512;

/// Real density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DensityMatrix {
    /// `|s⟩⟨s|` for the uniform superposition over `n` elements.
    pub fn uniform_superposition(n: usize) -> Self {
        Self { n, data: vec![1.0 / n as f64; n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Ok(Self { n, data })
    }

    /// `|i⟩⟨j|`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut data = vec![0.0; n * n];
        data[i * n + j] = 1.0;
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `⟨target|ρ|target⟩`.
    pub fn success_probability(&self) -> f64 {
        self.data[0]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    fn scaled_by(&self, factors: &[f64]) -> Self {
        Self { n: self.n, data: self.data.iter().zip(factors).map(|(x, f)| x * f).collect() }
    }
}

/// Which elements are dephased, how, and how strongly.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    kind: NoiseKind,
    noisy_set: Vec<usize>,
    rate: f64,
    target_rate: f64,
}

impl NoiseConfig {
    pub fn new(kind: NoiseKind, noisy_set: &[usize], rate: f64) -> Result<Self> {
        let mut set = noisy_set.to_vec();
        set.sort_unstable();
        set.dedup();
        Ok(Self { kind, noisy_set: set, rate: check_rate("rate", rate)?, target_rate: 0.0 })
    }

    pub fn noiseless() -> Self {
        Self { kind: NoiseKind::Coupled, noisy_set: Vec::new(), rate: 0.0, target_rate: 0.0 }
    }

    /// Additional canonical dephasing of the target alone at `rate`.
    pub fn with_target_rate(mut self, rate: f64) -> Result<Self> {
        self.target_rate = check_rate("target_rate", rate)?;
        Ok(self)
    }

    /// The noisy set of a scenario: elements `1..=k`, plus the target when
    /// it is noisy.
    pub fn for_problem(spec: &ProblemSpec, rate: f64) -> Result<Self> {
        let start = if spec.target_noisy() { 0 } else { 1 };
        let set: Vec<usize> = (start..=spec.noisy_count()).collect();
        Self::new(spec.noise_kind(), &set, rate)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn noisy_set(&self) -> &[usize] {
        &self.noisy_set
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn target_rate(&self) -> f64 {
        self.target_rate
    }

    fn check_indices(&self, n: usize) -> Result<()> {
        match self.noisy_set.last() {
            Some(&max) if max >= n => Err(Error::InvalidParameter {
                field: "noisy_set",
                reason: "element index out of range",
            }),
            _ => Ok(()),
        }
    }

    /// Elementwise factors of the whole dephasing step.
    fn factors(&self, n: usize) -> Result<Vec<f64>> {
        self.check_indices(n)?;
        let membership = membership(n, &self.noisy_set);
        let mut f = match self.kind {
            NoiseKind::Coupled => coupled_mask(&membership, self.rate),
            NoiseKind::Decoupled => decoupled_mask(&membership, self.rate),
        };
        if self.target_rate > 0.0 {
            let target = coupled_mask(&membership_of_target(n), self.target_rate);
            f.iter_mut().zip(target).for_each(|(a, b)| *a *= b);
        }
        Ok(f)
    }
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &i in set {
        inside[i] = true;
    }
    inside
}

fn membership_of_target(n: usize) -> Vec<bool> {
    let mut inside = vec![false; n];
    inside[0] = true;
    inside
}

fn coupled_mask(inside: &[bool], p: f64) -> Vec<f64> {
    let n = inside.len();
    let mut f = vec![1.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if inside[i] != inside[j] {
                f[i * n + j] = 1.0 - p;
            }
        }
    }
    f
}

fn decoupled_mask(inside: &[bool], p: f64) -> Vec<f64> {
    let n = inside.len();
    let mut f = vec![1.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            f[i * n + j] = match (inside[i], inside[j]) {
                (true, true) => (1.0 - p) * (1.0 - p),
                (false, false) => 1.0,
                _ => 1.0 - p,
            };
        }
    }
    f
}

fn check_set(rho: &DensityMatrix, set: &[usize]) -> Result<()> {
    if set.iter().any(|&i| i >= rho.dim()) {
        return Err(Error::InvalidParameter { field: "noisy_set", reason: "element index out of range" });
    }
    Ok(())
}

/// `p Π₀ρΠ₀ + p Π₁ρΠ₁ + (1-p) ρ` with `Π₀` projecting onto `noisy_set`.
pub fn apply_coupled_dephasing(rho: &DensityMatrix, noisy_set: &[usize], p: f64) -> Result<DensityMatrix> {
    let p = check_rate("p", p)?;
    check_set(rho, noisy_set)?;
    Ok(rho.scaled_by(&coupled_mask(&membership(rho.dim(), noisy_set), p)))
}

/// Composition of canonical dephasings on every element of `noisy_set`.
pub fn apply_decoupled_dephasing(rho: &DensityMatrix, noisy_set: &[usize], p: f64) -> Result<DensityMatrix> {
    let p = check_rate("p", p)?;
    check_set(rho, noisy_set)?;
    Ok(rho.scaled_by(&decoupled_mask(&membership(rho.dim(), noisy_set), p)))
}

/// Explicit `U = G R_f` with `G = 2|s⟩⟨s| - I` and the target at index 0.
pub fn grover_unitary(n: usize) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::InvalidParameter { field: "n", reason: "need at least 2 elements" });
    }
    let t = 2.0 / n as f64;
    Ok(Matrix::from_fn(n, n, |i, j| {
        let g = if i == j { t - 1.0 } else { t };
        if j == 0 {
            -g
        } else {
            g
        }
    }))
}

/// `U ρ Uᵀ` in `O(N²)`, using `G = tJ - I` with `J` the all-ones matrix.
pub fn apply_grover(rho: &DensityMatrix) -> DensityMatrix {
    let n = rho.dim();
    let t = 2.0 / n as f64;
    let mut x = rho.data.clone();
    // R_f ρ R_f flips row 0 and column 0
    for j in 1..n {
        x[j] = -x[j];
        x[j * n] = -x[j * n];
    }
    let mut row_sums = vec![0.0; n];
    let mut col_sums = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let v = x[i * n + j];
            row_sums[i] += v;
            col_sums[j] += v;
        }
    }
    let total: f64 = row_sums.iter().sum();
    let shift = t * t * total;
    for i in 0..n {
        for j in 0..n {
            x[i * n + j] += shift - t * (col_sums[j] + row_sums[i]);
        }
    }
    DensityMatrix { n, data: x }
}

/// Exact simulator with a cap on `N`.
#[derive(Debug, Clone, Copy)]
pub struct FullSimulator {
    pub max_n: usize,
}

impl Default for FullSimulator {
    fn default() -> Self {
        Self { max_n: DEFAULT_MAX_N }
    }
}

impl FullSimulator {
    pub fn with_cap(max_n: usize) -> Self {
        Self { max_n }
    }

    /// Runs `steps` noisy steps from `|s⟩⟨s|`, calling `visit(m, ρ(m))` for
    /// `m = 0..=steps`.
    pub fn run(
        &self,
        n: usize,
        noise: &NoiseConfig,
        steps: usize,
        mut visit: impl FnMut(usize, &DensityMatrix),
    ) -> Result<()> {
        if n > self.max_n {
            return Err(Error::ResourceCap { n, cap: self.max_n });
        }
        if n < 2 {
            return Err(Error::InvalidParameter { field: "n", reason: "need at least 2 elements" });
        }
        let factors = noise.factors(n)?;
        let mut rho = DensityMatrix::uniform_superposition(n);
        visit(0, &rho);
        for m in 1..=steps {
            rho = apply_grover(&rho.scaled_by(&factors));
            visit(m, &rho);
        }
        Ok(())
    }

    pub fn evolve(&self, n: usize, noise: &NoiseConfig, steps: usize) -> Result<EvolutionTrace> {
        let mut success = Vec::with_capacity(steps + 1);
        self.run(n, noise, steps, |_, rho| success.push(rho.success_probability()))?;
        Ok(EvolutionTrace::new(success))
    }
}

/// [`FullSimulator::evolve`] with the default cap.
pub fn evolve_full(n: usize, noise: &NoiseConfig, steps: usize) -> Result<EvolutionTrace> {
    FullSimulator::default().evolve(n, noise, steps)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    Target,
    Noisy,
    Clean,
}

/// σ-slot and per-entry weight of the matrix entry `(i, j)`, or `None` when
/// no basis operator touches it.
fn slot_of(spec: &ProblemSpec, gi: Group, gj: Group, diagonal: bool) -> Option<(usize, f64)> {
    use Group::*;
    let n = spec.n_elements() as f64;
    let k = spec.noisy_count() as f64;
    let m = spec.clean_count() as f64;
    match spec.basis_kind() {
        BasisKind::General7 | BasisKind::Coupled6 => {
            let coupled = spec.basis_kind() == BasisKind::Coupled6;
            Some(match (gi, gj) {
                (Target, Target) => (0, 1.0),
                (Noisy, Noisy) if coupled => (1, 1.0 / k),
                (Noisy, Noisy) if diagonal => (6, 1.0 / k.sqrt()),
                (Noisy, Noisy) => (1, 1.0 / (k * (k - 1.0)).sqrt()),
                (Clean, Clean) => (2, 1.0 / m),
                (Target, Noisy) | (Noisy, Target) => (3, 1.0 / (2.0 * k).sqrt()),
                (Noisy, Clean) | (Clean, Noisy) => (4, 1.0 / (2.0 * k * m).sqrt()),
                (Target, Clean) | (Clean, Target) => (5, 1.0 / (2.0 * m).sqrt()),
            })
        }
        BasisKind::EqualTreatment4 => {
            let normals = n - 1.0;
            match (gi, gj) {
                (Target, Target) => Some((0, 1.0)),
                (Noisy, Noisy) if diagonal => Some((3, 1.0 / normals.sqrt())),
                (Noisy, Noisy) => Some((1, 1.0 / (normals * (normals - 1.0)).sqrt())),
                (Target, Noisy) | (Noisy, Target) => Some((2, 1.0 / (2.0 * normals).sqrt())),
                _ => None,
            }
        }
    }
}

fn group_of(spec: &ProblemSpec, i: usize) -> Group {
    if i == 0 {
        Group::Target
    } else if spec.basis_kind() == BasisKind::EqualTreatment4 || i <= spec.noisy_count() {
        // in the 4-dim basis every normal element sits in one group
        Group::Noisy
    } else {
        Group::Clean
    }
}

/// Coefficients `a_j = Tr[σ_jᵀ ρ]` over the active basis, together with the
/// Frobenius norm of `ρ - Σ a_j σ_j`.
pub fn project_to_sigma(rho: &DensityMatrix, spec: &ProblemSpec) -> Result<(SigmaState, f64)> {
    let n = spec.n_elements();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho.dim() });
    }
    let groups: Vec<Group> = (0..n).map(|i| group_of(spec, i)).collect();
    let mut coeffs = vec![0.0; spec.dim()];
    for i in 0..n {
        for j in 0..n {
            if let Some((slot, weight)) = slot_of(spec, groups[i], groups[j], i == j) {
                coeffs[slot] += weight * rho.get(i, j);
            }
        }
    }
    let mut residual_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let fitted = slot_of(spec, groups[i], groups[j], i == j).map_or(0.0, |(s, w)| coeffs[s] * w);
            let d = rho.get(i, j) - fitted;
            residual_sq += d * d;
        }
    }
    Ok((SigmaState::new(spec, coeffs)?, residual_sq.sqrt()))
}
