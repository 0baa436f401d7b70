//! Noisy Grover evolution on the invariant operator subspace.
//!
//! Element `1` of the database is the target, elements `2..=k+1` are the
//! noisy normal elements and the remaining `M = N - k - 1` are clean normal
//! elements. The density matrix stays in the span of a handful of real
//! operators (the σ-basis), orthonormal under `(A, B) = Tr[Aᵀ B]`:
//!
//! | slot | operator                                      |
//! |------|-----------------------------------------------|
//! | σ₁   | `|1⟩⟨1|`                                      |
//! | σ₂   | off-diagonal block of the noisy normals       |
//! | σ₃   | uniform block of the clean normals            |
//! | σ₄   | target / noisy-normal coherences              |
//! | σ₅   | noisy-normal / clean-normal coherences        |
//! | σ₆   | target / clean-normal coherences              |
//! | σ₇   | diagonal of the noisy normals                 |
//!
//! Three variants are used, see [`BasisKind`]. One step is
//! `a ↦ U · (D ⊙ a)`: dephasing first, then the Grover unitary.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::SQRT_2;

#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;

use crate::error::{check_rate, Error, Result};
use crate::linalg::Matrix;
use crate::trace::EvolutionTrace;

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseKind {
    /// One partial projection splitting the space into two blocks.
    Coupled,
    /// Independent canonical dephasing on every affected element.
    Decoupled,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Coupled => "coupled",
            NoiseKind::Decoupled => "decoupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// σ₁..σ₇; decoupled noise with `2 <= k <= N - 2`.
    General7,
    /// σ₁, σ̃₂, σ₃..σ₆ where σ̃₂ merges σ₂ and σ₇; coupled noise, and
    /// decoupled noise with a single noisy normal element.
    Coupled6,
    /// σ₁, σ₂, σ₄, σ₇ over all `N - 1` normal elements; every normal element
    /// is treated alike (`k = 0` or `k = N - 1`).
    EqualTreatment4,
}

impl BasisKind {
    pub fn dim(self) -> usize {
        match self {
            BasisKind::General7 => 7,
            BasisKind::Coupled6 => 6,
            BasisKind::EqualTreatment4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::General7 => "general-7",
            BasisKind::Coupled6 => "coupled-6",
            BasisKind::EqualTreatment4 => "equal-treatment-4",
        }
    }
}

/// Database layout and noise scenario; selects the reduced basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    n_elements: usize,
    noisy_count: usize,
    noise_kind: NoiseKind,
    target_noisy: bool,
    basis_kind: BasisKind,
}

impl ProblemSpec {
    pub fn new(
        n_elements: usize,
        noisy_count: usize,
        noise_kind: NoiseKind,
        target_noisy: bool,
    ) -> Result<Self> {
        if n_elements < 4 {
            return Err(Error::InvalidParameter { field: "n", reason: "need at least 4 elements" });
        }
        if noisy_count > n_elements - 1 {
            return Err(Error::InvalidParameter {
                field: "k",
                reason: "at most N - 1 normal elements can be noisy",
            });
        }
        let basis_kind = if noisy_count == 0 || noisy_count == n_elements - 1 {
            BasisKind::EqualTreatment4
        } else if noise_kind == NoiseKind::Coupled || noisy_count == 1 {
            BasisKind::Coupled6
        } else {
            BasisKind::General7
        };
        Ok(Self { n_elements, noisy_count, noise_kind, target_noisy, basis_kind })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn noisy_count(&self) -> usize {
        self.noisy_count
    }

    /// Clean normal elements, `M = N - k - 1`.
    pub fn clean_count(&self) -> usize {
        self.n_elements - self.noisy_count - 1
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise_kind
    }

    pub fn target_noisy(&self) -> bool {
        self.target_noisy
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    pub fn dim(&self) -> usize {
        self.basis_kind.dim()
    }

    /// `t = 2/N`.
    pub fn t(&self) -> f64 {
        2.0 / self.n_elements as f64
    }

    /// `r = 1 - t`.
    pub fn r(&self) -> f64 {
        1.0 - self.t()
    }

    /// Weight of each slot in the trace functional.
    pub fn trace_weights(&self) -> Vec<f64> {
        let n = self.n_elements as f64;
        let k = self.noisy_count as f64;
        match self.basis_kind {
            BasisKind::General7 => vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, k.sqrt()],
            BasisKind::Coupled6 => vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
            BasisKind::EqualTreatment4 => vec![1.0, 0.0, 0.0, (n - 1.0).sqrt()],
        }
    }
}

/// See [`ProblemSpec::new`].
pub fn select_basis(
    n_elements: usize,
    noisy_count: usize,
    noise_kind: NoiseKind,
    target_noisy: bool,
) -> Result<ProblemSpec> {
    ProblemSpec::new(n_elements, noisy_count, noise_kind, target_noisy)
}

/// Dephasing rates as seen by the σ-basis.
///
/// `p` damps noisy/clean normal coherences (σ₅), `q` target/clean
/// coherences (σ₆), `s` target/noisy coherences (σ₄) and `w` coherences
/// inside the noisy block (σ₂). In the four-dimensional basis the factors
/// are `(1-p)²` on σ₂ and `(1-p)(1-q)` on σ₄, so there `w = 2p - p²` and
/// `s = p + q - pq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub w: f64,
}

impl NoiseParams {
    pub const ZERO: NoiseParams = NoiseParams { p: 0.0, q: 0.0, s: 0.0, w: 0.0 };

    pub fn new(p: f64, q: f64, s: f64, w: f64) -> Result<Self> {
        Ok(Self {
            p: check_rate("p", p)?,
            q: check_rate("q", q)?,
            s: check_rate("s", s)?,
            w: check_rate("w", w)?,
        })
    }

    /// Rates for a single base rate applied to the scenario's noisy set.
    ///
    /// The noisy set is the `k` noisy normal elements plus the target when
    /// `spec.target_noisy()`.
    pub fn for_problem(spec: &ProblemSpec, base_rate: f64) -> Result<Self> {
        let p0 = check_rate("p", base_rate)?;
        let k = spec.noisy_count();
        let all_normals = k == spec.n_elements() - 1;
        match (spec.noise_kind(), spec.target_noisy()) {
            (NoiseKind::Decoupled, noisy) => {
                Self::with_target_rate(spec, p0, if noisy { p0 } else { 0.0 })
            }
            (NoiseKind::Coupled, false) => Self::with_target_rate(spec, p0, 0.0),
            // target inside the dephased block: target/noisy coherences survive
            (NoiseKind::Coupled, true) => match spec.basis_kind() {
                BasisKind::Coupled6 => Self::new(p0, p0, 0.0, 0.0),
                BasisKind::EqualTreatment4 if all_normals => Ok(Self::ZERO),
                BasisKind::EqualTreatment4 => Self::four_dim(0.0, p0),
                BasisKind::General7 => unreachable!("coupled noise never selects General7"),
            },
        }
    }

    /// Noisy normal elements dephased at rate `p` (coupled or decoupled as
    /// in `spec`) and the target additionally dephased on its own at rate
    /// `q`.
    pub fn with_target_rate(spec: &ProblemSpec, p: f64, q: f64) -> Result<Self> {
        let p = check_rate("p", p)?;
        let q = check_rate("q", q)?;
        let both = p + q - p * q;
        let k = spec.noisy_count();
        match spec.basis_kind() {
            BasisKind::General7 => Self::new(p, q, both, p * (2.0 - p)),
            BasisKind::Coupled6 => {
                let w = if spec.noise_kind() == NoiseKind::Decoupled { p * (2.0 - p) } else { 0.0 };
                Self::new(p, q, both, w)
            }
            BasisKind::EqualTreatment4 if k == 0 => Self::four_dim(0.0, q),
            BasisKind::EqualTreatment4 => match spec.noise_kind() {
                NoiseKind::Decoupled => Self::four_dim(p, q),
                // one block holding every normal element: only the
                // target/normal coherences are damped
                NoiseKind::Coupled => Self::four_dim(0.0, both),
            },
        }
    }

    /// Rates for the four-dimensional basis from `(p, q)`.
    pub fn four_dim(p: f64, q: f64) -> Result<Self> {
        let p = check_rate("p", p)?;
        let q = check_rate("q", q)?;
        Self::new(p, q, p + q - p * q, p * (2.0 - p))
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0.0 && self.q == 0.0 && self.s == 0.0 && self.w == 0.0
    }

    fn validate_for(&self, spec: &ProblemSpec) -> Result<()> {
        Self::new(self.p, self.q, self.s, self.w)?;
        let basis = spec.basis_kind().name();
        match spec.basis_kind() {
            BasisKind::General7 => Ok(()),
            BasisKind::Coupled6 => {
                if spec.noisy_count() >= 2 && self.w != 0.0 {
                    Err(Error::InconsistentNoise {
                        basis,
                        reason: "coherences inside the noisy block cannot be damped (w must be 0)",
                    })
                } else {
                    Ok(())
                }
            }
            BasisKind::EqualTreatment4 => {
                let (p, q) = (self.p, self.q);
                if (self.w - p * (2.0 - p)).abs() > CONSISTENCY_TOL {
                    Err(Error::InconsistentNoise { basis, reason: "w must equal 2p - p^2" })
                } else if (self.s - (p + q - p * q)).abs() > CONSISTENCY_TOL {
                    Err(Error::InconsistentNoise { basis, reason: "s must equal p + q - pq" })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Coefficients of a state in the active σ-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaState {
    coeffs: Vec<f64>,
    trace_weights: Vec<f64>,
}

impl SigmaState {
    pub fn new(spec: &ProblemSpec, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), found: coeffs.len() });
        }
        Ok(Self { coeffs, trace_weights: spec.trace_weights() })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `p_suc = a₁`.
    pub fn success_probability(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn trace(&self) -> f64 {
        self.coeffs.iter().zip(&self.trace_weights).map(|(a, w)| a * w).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
            trace_weights: self.trace_weights.clone(),
        }
    }
}

pub fn success_probability(state: &SigmaState) -> f64 {
    state.success_probability()
}

pub fn trace_of(state: &SigmaState) -> f64 {
    state.trace()
}

/// σ-coefficients of the uniform superposition `|s⟩⟨s|`.
pub fn initial_state(spec: &ProblemSpec) -> SigmaState {
    let t = spec.t();
    let r = spec.r();
    let k = spec.noisy_count() as f64;
    let m = spec.clean_count() as f64;
    let coeffs: Vec<f64> = match spec.basis_kind() {
        BasisKind::General7 => [
            1.0,
            (k * (k - 1.0)).sqrt(),
            m,
            (2.0 * k).sqrt(),
            (2.0 * m * k).sqrt(),
            (2.0 * m).sqrt(),
            k.sqrt(),
        ]
        .iter()
        .map(|x| 0.5 * t * x)
        .collect(),
        BasisKind::Coupled6 => [1.0, k, m, (2.0 * k).sqrt(), (2.0 * k * m).sqrt(), (2.0 * m).sqrt()]
            .iter()
            .map(|x| 0.5 * t * x)
            .collect(),
        BasisKind::EqualTreatment4 => [
            t,
            (2.0 * r * (1.0 + r)).sqrt(),
            (2.0 * t * (1.0 + r)).sqrt(),
            (t * (1.0 + r)).sqrt(),
        ]
        .iter()
        .map(|x| 0.5 * x)
        .collect(),
    };
    SigmaState { coeffs, trace_weights: spec.trace_weights() }
}

/// One noisy step on the reduced space: `a ↦ U · (D ⊙ a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedStep {
    unitary: Matrix,
    dephasing: Vec<f64>,
}

impl ReducedStep {
    pub fn unitary_matrix(&self) -> &Matrix {
        &self.unitary
    }

    pub fn dephasing_diag(&self) -> &[f64] {
        &self.dephasing
    }

    pub fn dim(&self) -> usize {
        self.dephasing.len()
    }

    /// The full step as one matrix, `U · diag(D)`.
    pub fn evolution_matrix(&self) -> Matrix {
        self.unitary
            .scale_columns(&self.dephasing)
            .expect("dephasing diagonal matches the unitary")
    }
}

pub fn build_step(spec: &ProblemSpec, noise: &NoiseParams) -> Result<ReducedStep> {
    noise.validate_for(spec)?;
    let NoiseParams { p, q, s, w } = *noise;
    let (unitary, dephasing) = match spec.basis_kind() {
        BasisKind::General7 => (
            general_unitary(spec.n_elements(), spec.noisy_count()),
            vec![1.0, 1.0 - w, 1.0, 1.0 - s, 1.0 - p, 1.0 - q, 1.0],
        ),
        BasisKind::Coupled6 => (
            coupled_unitary(spec.n_elements(), spec.noisy_count()),
            vec![1.0, 1.0, 1.0, 1.0 - s, 1.0 - p, 1.0 - q],
        ),
        BasisKind::EqualTreatment4 => (
            equal_treatment_unitary(spec.n_elements()),
            vec![1.0, (1.0 - p) * (1.0 - p), (1.0 - p) * (1.0 - q), 1.0],
        ),
    };
    Ok(ReducedStep { unitary, dephasing })
}

pub fn step(state: &SigmaState, reduced: &ReducedStep) -> Result<SigmaState> {
    if state.dim() != reduced.dim() {
        return Err(Error::DimensionMismatch { expected: reduced.dim(), found: state.dim() });
    }
    let damped: Vec<f64> = state.coeffs.iter().zip(&reduced.dephasing).map(|(a, d)| a * d).collect();
    Ok(SigmaState {
        coeffs: reduced.unitary.mul_vec(&damped)?,
        trace_weights: state.trace_weights.clone(),
    })
}

/// Success probability for `m = 0..=steps`, starting from `|s⟩⟨s|`.
pub fn evolve(spec: &ProblemSpec, noise: &NoiseParams, steps: usize) -> Result<EvolutionTrace> {
    let reduced = build_step(spec, noise)?;
    let propagator = reduced.evolution_matrix();
    let mut a = initial_state(spec).coeffs;
    let mut success = Vec::with_capacity(steps + 1);
    success.push(a[0]);
    for _ in 0..steps {
        a = propagator.mul_vec(&a)?;
        success.push(a[0]);
    }
    Ok(EvolutionTrace::new(success))
}

/// Every σ-state visited from `|s⟩⟨s|`, `m = 0..=steps`.
pub fn trajectory(spec: &ProblemSpec, noise: &NoiseParams, steps: usize) -> Result<Vec<SigmaState>> {
    let reduced = build_step(spec, noise)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut state = initial_state(spec);
    for _ in 0..steps {
        let next = step(&state, &reduced)?;
        states.push(core::mem::replace(&mut state, next));
    }
    states.push(state);
    Ok(states)
}

/// Columns are the images `U σ_j Uᵀ` of σ₁..σ₇ under the Grover unitary.
fn general_unitary(n: usize, k: usize) -> Matrix {
    let t = 2.0 / n as f64;
    let r = 1.0 - t;
    let k = k as f64;
    let m = (n as f64) - k - 1.0;
    let s2 = SQRT_2;
    let kk = (k * (k - 1.0)).sqrt();
    let k1 = (k - 1.0).sqrt();
    let (sk, sm, smk) = (k.sqrt(), m.sqrt(), (m * k).sqrt());
    let tk = t * k;
    let tm = t * m;

    let columns = [
        [r * r, t * t * kk, t * t * m, -r * t * s2 * sk, t * t * s2 * smk, -r * t * s2 * sm, t * t * sk],
        [
            t * t * kk,
            1.0 + t * (k - 1.0) * (tk - 2.0),
            t * t * m * kk,
            t * (tk - 1.0) * s2 * k1,
            t * (tk - 1.0) * s2 * sm * k1,
            t * t * s2 * smk * k1,
            t * (tk - 2.0) * k1,
        ],
        [
            t * t * m,
            t * t * m * kk,
            (1.0 - tm) * (1.0 - tm),
            t * t * m * s2 * sk,
            -t * (1.0 - tm) * s2 * sm * sk,
            -t * (1.0 - tm) * s2 * sm,
            t * t * m * sk,
        ],
        [
            t * r * s2 * sk,
            s2 * t * (1.0 - tk) * k1,
            -t * t * m * s2 * sk,
            -(r - tk * (1.0 - 2.0 * t)),
            t * (1.0 - 2.0 * tk) * sm,
            t * (1.0 - 2.0 * t) * smk,
            s2 * t * (1.0 - tk),
        ],
        [
            t * t * s2 * smk,
            t * (tk - 1.0) * s2 * sm * k1,
            t * (tm - 1.0) * s2 * smk,
            t * (2.0 * tk - 1.0) * sm,
            2.0 * t * t * m * k - r,
            t * (2.0 * tm - 1.0) * sk,
            t * (tk - 1.0) * s2 * sm,
        ],
        [
            t * r * s2 * sm,
            -t * t * s2 * smk * k1,
            -t * (tm - 1.0) * s2 * sm,
            t * (1.0 - 2.0 * t) * smk,
            t * (1.0 - 2.0 * tm) * sk,
            1.0 - tk - 2.0 * t * t * m,
            -t * t * s2 * smk,
        ],
        [
            t * t * sk,
            -t * (2.0 - tk) * k1,
            t * t * m * sk,
            s2 * t * (tk - 1.0),
            s2 * t * (tk - 1.0) * sm,
            t * t * s2 * smk,
            1.0 - 2.0 * t + t * tk,
        ],
    ];
    Matrix::from_columns(&columns).expect("seven columns of length seven")
}

/// Six-dimensional variant with σ̃₂ = (1/k) Σ_{j,m ∈ noisy} |j⟩⟨m| in slot 2.
fn coupled_unitary(n: usize, k: usize) -> Matrix {
    let t = 2.0 / n as f64;
    let r = 1.0 - t;
    let k = k as f64;
    let m = (n as f64) - k - 1.0;
    let s2 = SQRT_2;
    let (sk, sm, smk) = (k.sqrt(), m.sqrt(), (m * k).sqrt());
    let tk = t * k;
    let tm = t * m;

    let columns = [
        [r * r, t * t * k, t * t * m, -r * t * s2 * sk, t * t * s2 * smk, -r * t * s2 * sm],
        [
            t * t * k,
            (1.0 - tk) * (1.0 - tk),
            t * t * k * m,
            -t * s2 * sk * (1.0 - tk),
            -t * s2 * smk * (1.0 - tk),
            t * t * k * s2 * sm,
        ],
        [
            t * t * m,
            t * t * m * k,
            (1.0 - tm) * (1.0 - tm),
            t * t * m * s2 * sk,
            -t * (1.0 - tm) * s2 * sm * sk,
            -t * (1.0 - tm) * s2 * sm,
        ],
        [
            t * r * s2 * sk,
            t * (1.0 - tk) * s2 * sk,
            -t * t * m * s2 * sk,
            -(r - tk * (1.0 - 2.0 * t)),
            t * (1.0 - 2.0 * tk) * sm,
            t * (1.0 - 2.0 * t) * smk,
        ],
        [
            t * t * s2 * smk,
            t * (tk - 1.0) * s2 * smk,
            t * (tm - 1.0) * s2 * smk,
            t * (2.0 * tk - 1.0) * sm,
            2.0 * t * t * m * k - r,
            t * (2.0 * tm - 1.0) * sk,
        ],
        [
            t * r * s2 * sm,
            -t * t * k * s2 * sm,
            -t * (tm - 1.0) * s2 * sm,
            t * (1.0 - 2.0 * t) * smk,
            t * (1.0 - 2.0 * tm) * sk,
            1.0 - tk - 2.0 * t * t * m,
        ],
    ];
    Matrix::from_columns(&columns).expect("six columns of length six")
}

/// Four-dimensional variant (σ₁, σ₂, σ₄, σ₇ over all normal elements):
/// the general rules restricted to `k = N - 1`, `M = 0`.
fn equal_treatment_unitary(n: usize) -> Matrix {
    let full = general_unitary(n, n - 1);
    const KEEP: [usize; 4] = [0, 1, 3, 6];
    Matrix::from_fn(4, 4, |i, j| full[(KEEP[i], KEEP[j])])
}
