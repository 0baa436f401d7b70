//! First-order closed forms for the success probability, the noiseless
//! optimum and the limiting states of the noisy iteration.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;

use crate::error::{check_rate, Error, Result};
use crate::linalg::{dot, null_space, Matrix};
use crate::reduced::{build_step, initial_state, BasisKind, NoiseKind, NoiseParams, ProblemSpec, SigmaState};
use crate::spectral::eigenvalues;

/// Constant `c` turning "rate ≪ bound" into "rate < c · bound".
pub const VALIDITY_CONSTANT: f64 = 0.1;

const NOISE_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    InRegion,
    OutOfRegion,
}

impl Validity {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Validity::InRegion
        } else {
            Validity::OutOfRegion
        }
    }

    pub fn in_region(self) -> bool {
        self == Validity::InRegion
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxResult {
    /// Approximate success probability.
    pub value: f64,
    pub validity: Validity,
    /// The condition `validity` was checked against.
    pub constraint_note: &'static str,
}

fn check_n(n: usize) -> Result<f64> {
    if n < 4 {
        Err(Error::InvalidParameter { field: "n", reason: "need at least 4 elements" })
    } else {
        Ok(n as f64)
    }
}

fn pow_m(base: f64, m: usize) -> f64 {
    base.powi(m.min(i32::MAX as usize) as i32)
}

/// Grover angle `θ` with `cos θ = 1 - 2/N`.
pub fn grover_angle(n: usize) -> f64 {
    (1.0 - 2.0 / n as f64).acos()
}

/// Noiseless success probability `sin²((2m+1)θ/2)` after `m` steps.
pub fn grover_success(n: usize, m: usize) -> f64 {
    let half = (2 * m + 1) as f64 * grover_angle(n) / 2.0;
    let s = half.sin();
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalSteps {
    /// `(π/4)√N`.
    pub real: f64,
    /// `real` rounded to the nearest integer.
    pub rounded: usize,
}

pub fn optimal_steps(n: usize) -> OptimalSteps {
    let real = FRAC_PI_4 * (n as f64).sqrt();
    OptimalSteps { real, rounded: real.round() as usize }
}

fn periodic_term(n: usize, m: usize, damping: f64) -> f64 {
    0.5 * ((2 * m + 1) as f64 * grover_angle(n)).cos() * pow_m(damping, m)
}

/// All normal elements dephased at rate `p`, the target at rate `q`.
pub fn approx_equal_treatment(n: usize, p: f64, q: f64, m: usize) -> Result<ApproxResult> {
    let nf = check_n(n)?;
    let p = check_rate("p", p)?;
    let q = check_rate("q", q)?;
    let value = 1.0 / nf + (nf - 2.0) / (2.0 * nf) * pow_m(1.0 - nf * p / (nf - 1.0), m)
        - periodic_term(n, m, 1.0 - (2.0 * nf - 3.0) * p / (2.0 * (nf - 1.0)) - q / 2.0);
    let bound = VALIDITY_CONSTANT / nf.sqrt();
    Ok(ApproxResult {
        value,
        validity: Validity::from_bool(p < bound && q < bound),
        constraint_note: "p, q < 0.1/sqrt(N)",
    })
}

/// `k` normal elements dephased together (one block) at rate `p`.
pub fn approx_coupled(n: usize, k: usize, p: f64, m: usize) -> Result<ApproxResult> {
    let nf = check_n(n)?;
    let p = check_rate("p", p)?;
    if k >= n {
        return Err(Error::InvalidParameter { field: "k", reason: "must be below N" });
    }
    let kf = k as f64;
    let clean = nf - kf - 1.0;
    let d = (nf - 1.0) * (nf - 1.0);
    let value = 1.0 / 3.0 + pow_m(1.0 - 3.0 * kf * clean * p / d, m) / 6.0
        - periodic_term(n, m, 1.0 - kf * (2.0 * nf - kf - 2.0) * p / (2.0 * d));
    Ok(ApproxResult {
        value,
        validity: Validity::from_bool(kf * p < VALIDITY_CONSTANT * nf.sqrt()),
        constraint_note: "k p < 0.1 sqrt(N)",
    })
}

/// `k` normal elements dephased independently at rate `p`, the target at
/// rate `q`.
pub fn approx_decoupled_general(n: usize, k: usize, p: f64, q: f64, m: usize) -> Result<ApproxResult> {
    let nf = check_n(n)?;
    let p = check_rate("p", p)?;
    let q = check_rate("q", q)?;
    if k >= n {
        return Err(Error::InvalidParameter { field: "k", reason: "must be below N" });
    }
    let kf = k as f64;
    let d = (nf - 1.0) * (nf - 1.0);
    let value = 1.0 / (kf + 2.0)
        + kf / (2.0 * (kf + 2.0)) * pow_m(1.0 - (nf - 2.0) * (kf + 2.0) * p / d, m)
        - periodic_term(n, m, 1.0 - kf * (2.0 * nf - 3.0) * p / (2.0 * d) - q / 2.0);
    Ok(ApproxResult {
        value,
        validity: Validity::from_bool(kf * p < VALIDITY_CONSTANT * nf.sqrt() && q < VALIDITY_CONSTANT / nf.sqrt()),
        constraint_note: "k p < 0.1 sqrt(N) and q < 0.1/sqrt(N)",
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= NOISE_MATCH_TOL
}

/// The closed form matching a scenario, if one exists.
///
/// Returns `None` for rate combinations no closed form covers, such as a
/// decoupled noisy block whose σ₂ damping differs from `2p - p²`.
pub fn approx_for(spec: &ProblemSpec, noise: &NoiseParams, m: usize) -> Result<Option<ApproxResult>> {
    let n = spec.n_elements();
    let k = spec.noisy_count();
    let NoiseParams { p, q, s, w } = *noise;
    let joint = p + q - p * q;
    let result = match spec.basis_kind() {
        BasisKind::EqualTreatment4 => Some(approx_equal_treatment(n, p, q, m)?),
        BasisKind::Coupled6 if spec.noise_kind() == NoiseKind::Coupled || k >= 2 => {
            if w == 0.0 && q == 0.0 && close(s, p) {
                Some(approx_coupled(n, k, p, m)?)
            } else if s == 0.0 && close(q, p) {
                // the target joins the block: the clean elements play its role
                Some(approx_coupled(n, n - k - 1, p, m)?)
            } else {
                None
            }
        }
        BasisKind::Coupled6 | BasisKind::General7 => {
            let w_ok = k < 2 || close(w, p * (2.0 - p));
            if w_ok && close(s, joint) {
                Some(approx_decoupled_general(n, k, p, q, m)?)
            } else {
                None
            }
        }
    };
    Ok(result)
}

/// Relative singular-value cutoff for the fixed-point space of the step.
const FIXED_SPACE_TOL: f64 = 1e-10;
/// Eigenvalues at least this close to the unit circle count as undamped.
const UNDAMPED_TOL: f64 = 1e-10;

/// Fixed point reached by the noisy iteration from `|s⟩⟨s|`.
///
/// The step is unital, so its fixed points coincide with those of the
/// adjoint and the limit is the orthogonal projection of the initial state
/// onto the fixed space. Fails with [`Error::NoLimit`] without noise or
/// whenever an undamped eigenvalue other than 1 survives.
pub fn limiting_state(spec: &ProblemSpec, noise: &NoiseParams) -> Result<SigmaState> {
    if noise.is_zero() {
        return Err(Error::NoLimit);
    }
    let step = build_step(spec, noise)?;
    let e = step.evolution_matrix();
    let one = Complex64::new(1.0, 0.0);
    let oscillating = eigenvalues(&e)?
        .iter()
        .any(|z| z.norm() > 1.0 - UNDAMPED_TOL && (z - one).norm() > UNDAMPED_TOL.sqrt());
    if oscillating {
        return Err(Error::NoLimit);
    }
    let dim = e.rows();
    let e_minus_i = Matrix::from_fn(dim, dim, |i, j| e[(i, j)] - if i == j { 1.0 } else { 0.0 });
    let init = initial_state(spec);
    let mut limit: Vec<f64> = alloc::vec![0.0; dim];
    for v in null_space(&e_minus_i, FIXED_SPACE_TOL) {
        let c = dot(&v, init.coeffs());
        for (l, x) in limit.iter_mut().zip(&v) {
            *l += c * x;
        }
    }
    SigmaState::new(spec, limit)
}
