//! Eigenvalues of the small reduced propagators and a numerical check of
//! the first-order perturbed spectrum in the four-dimensional basis.
//!
//! The solver balances the matrix, reduces it to upper Hessenberg form with
//! Householder reflections and runs the Francis double-shift QR iteration.
//! For matrices up to 4x4 a Durand–Kerner root finder on the characteristic
//! polynomial is kept as a fallback.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win once std is linked
use num_traits::Float;

use crate::analytics::grover_angle;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::reduced::{build_step, NoiseKind, NoiseParams, ProblemSpec};

/// Largest dimension the solver is meant for.
pub const MAX_DIM: usize = 8;

const QR_MAX_ITERATIONS_PER_ROOT: usize = 60;

/// All eigenvalues of a real square matrix, with multiplicity, sorted by real
/// part then imaginary part.
pub fn eigenvalues(matrix: &Matrix) -> Result<Vec<Complex64>> {
    match eigenvalues_qr(matrix) {
        Ok(ev) => Ok(ev),
        Err(Error::NoConvergence { .. }) if matrix.rows() <= 4 => eigenvalues_durand_kerner(matrix),
        Err(e) => Err(e),
    }
}

fn check_square(matrix: &Matrix) -> Result<usize> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
    }
    if matrix.rows() > MAX_DIM {
        return Err(Error::InvalidParameter { field: "matrix", reason: "dimension above 8" });
    }
    Ok(matrix.rows())
}

fn lexicographic(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

type Rows = Vec<Vec<f64>>;

fn to_rows(m: &Matrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Diagonal similarity scaling by powers of two, making row and column
/// norms comparable.
fn balance(a: &mut Rows) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut Rows) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| a[i][m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=high).rev() {
            ort[i] = a[i][m - 1] / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * a[i][j]).sum::<f64>() / h;
            for i in m..=high {
                a[i][j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * a[i][j]).sum::<f64>() / h;
            for j in m..=high {
                a[i][j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        a[m][m - 1] = scale * g;
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[i][j] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr(a: &mut Rows) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut roots = vec![Complex64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut total_iterations = 0usize;
    let mut shift = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let nu = nn as usize;
            // look for a negligible subdiagonal element
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                roots[nu] = Complex64::new(x + shift, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - w / z } else { hi };
                    roots[nu - 1] = Complex64::new(hi, 0.0);
                    roots[nu] = Complex64::new(lo, 0.0);
                } else {
                    roots[nu - 1] = Complex64::new(x + p, -z);
                    roots[nu] = Complex64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == QR_MAX_ITERATIONS_PER_ROOT {
                return Err(Error::NoConvergence { dim: n, iterations: total_iterations });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                shift += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iterations += 1;

            // two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..=nu and columns m..=nu
            let mut xk = 0.0;
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[k][k - 1] = -a[k][k - 1];
                    }
                } else {
                    a[k][k - 1] = -s * xk;
                }
                p += s;
                let xs = p / s;
                let ys = q / s;
                let zs = r / s;
                q /= p;
                r /= p;
                for j in k..=nu {
                    let mut pp = a[k][j] + q * a[k + 1][j];
                    if k != nu - 1 {
                        pp += r * a[k + 2][j];
                        a[k + 2][j] -= pp * zs;
                    }
                    a[k + 1][j] -= pp * ys;
                    a[k][j] -= pp * xs;
                }
                let mmin = if nu < k + 3 { nu } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = xs * a[i][k] + ys * a[i][k + 1];
                    if k != nu - 1 {
                        pp += zs * a[i][k + 2];
                        a[i][k + 2] -= pp * r;
                    }
                    a[i][k + 1] -= pp * q;
                    a[i][k] -= pp;
                }
            }
        }
    }
    Ok(roots)
}

/// Eigenvalues by balancing, Hessenberg reduction and shifted QR.
pub fn eigenvalues_qr(matrix: &Matrix) -> Result<Vec<Complex64>> {
    check_square(matrix)?;
    let mut a = to_rows(matrix);
    balance(&mut a);
    hessenberg(&mut a);
    let mut ev = hessenberg_qr(&mut a)?;
    ev.sort_by(lexicographic);
    Ok(ev)
}

/// Monic characteristic polynomial coefficients, highest degree first.
fn characteristic_polynomial(matrix: &Matrix) -> Vec<f64> {
    // Faddeev–LeVerrier
    let n = matrix.rows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = matrix.matmul(&m).expect("square");
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        let am = matrix.matmul(&next).expect("square");
        let tr: f64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs[k] = -tr / k as f64;
        m = next;
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Eigenvalues as roots of the characteristic polynomial (Durand–Kerner),
/// for matrices up to 4x4.
pub fn eigenvalues_durand_kerner(matrix: &Matrix) -> Result<Vec<Complex64>> {
    const MAX_ITERATIONS: usize = 5000;
    const RESIDUAL: f64 = 1e-13;
    let n = check_square(matrix)?;
    if n > 4 {
        return Err(Error::InvalidParameter { field: "matrix", reason: "Durand-Kerner fallback is limited to 4x4" });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let coeffs = characteristic_polynomial(matrix);
    let scale = coeffs.iter().map(|c| c.abs()).fold(1.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * scale.sqrt()).collect();
    for iteration in 0..MAX_ITERATIONS {
        let mut largest_step = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let delta = horner(&coeffs, zi) / denom;
            roots[i] = zi - delta;
            largest_step = largest_step.max(delta.norm());
        }
        let residual = roots.iter().map(|z| horner(&coeffs, *z).norm()).fold(0.0, f64::max);
        if residual < RESIDUAL || largest_step < 1e-15 {
            for z in roots.iter_mut() {
                if z.im.abs() < 1e-13 {
                    z.im = 0.0;
                }
            }
            roots.sort_by(lexicographic);
            return Ok(roots);
        }
        if iteration + 1 == MAX_ITERATIONS {
            break;
        }
    }
    Err(Error::NoConvergence { dim: n, iterations: MAX_ITERATIONS })
}

/// `(a, b) = Σ conj(a_j) b_j`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvectors of the noiseless four-dimensional unitary, slots
/// `(σ₁, σ₂, σ₄, σ₇)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnperturbedEigenvectors {
    /// The traceful 1-eigenvector.
    pub nu1: Vec<Complex64>,
    /// The traceless 1-eigenvector.
    pub nu2: Vec<Complex64>,
    /// Eigenvector for `e^{+2iθ}`.
    pub nu_plus: Vec<Complex64>,
    /// Eigenvector for `e^{-2iθ}`.
    pub nu_minus: Vec<Complex64>,
}

impl UnperturbedEigenvectors {
    pub fn all(&self) -> [&[Complex64]; 4] {
        [&self.nu1, &self.nu2, &self.nu_plus, &self.nu_minus]
    }
}

fn real_vec(v: [f64; 4]) -> Vec<Complex64> {
    v.iter().map(|x| Complex64::new(*x, 0.0)).collect()
}

pub fn unperturbed_eigenvectors(n: usize) -> Result<UnperturbedEigenvectors> {
    if n < 4 {
        return Err(Error::InvalidParameter { field: "n", reason: "need at least 4 elements" });
    }
    let t = 2.0 / n as f64;
    let r = 1.0 - t;
    let nu1 = real_vec([t.sqrt() / SQRT_2, 0.0, 0.0, (1.0 + r).sqrt() / SQRT_2]);
    let c2 = 1.0 / (2.0 * (1.0 + r)).sqrt();
    let nu2 = real_vec([c2 * (r * (1.0 + r)).sqrt(), c2 * SQRT_2, 0.0, -c2 * (r * t).sqrt()]);
    let cp = 1.0 / (2.0 * (1.0 + r).sqrt());
    let pair = |sign: f64| {
        vec![
            Complex64::new(cp * (1.0 + r).sqrt(), 0.0),
            Complex64::new(-cp * (2.0 * r).sqrt(), 0.0),
            Complex64::new(0.0, sign * cp * (2.0 * (1.0 + r)).sqrt()),
            Complex64::new(-cp * t.sqrt(), 0.0),
        ]
    };
    Ok(UnperturbedEigenvectors { nu1, nu2, nu_plus: pair(1.0), nu_minus: pair(-1.0) })
}

/// First-order eigenvalues `{1, λ̃, λ̃₊, λ̃₋}` of the four-dimensional step
/// with normal-element rate `p` and target rate `q`.
pub fn predicted_perturbed(n: usize, p: f64, q: f64) -> Vec<Complex64> {
    let nf = n as f64;
    let theta = grover_angle(n);
    let damped_one = 1.0 - nf / (nf - 1.0) * p;
    let radius = 1.0 - (2.0 * nf - 3.0) / (2.0 * (nf - 1.0)) * p - q / 2.0;
    vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(damped_one, 0.0),
        Complex64::from_polar(radius, 2.0 * theta),
        Complex64::from_polar(radius, -2.0 * theta),
    ]
}

/// Matches every prediction to a distinct computed eigenvalue, closest
/// pairs first. Returns `pairing[i]` = index into `computed` for
/// `predicted[i]`.
pub fn pair_nearest(predicted: &[Complex64], computed: &[Complex64]) -> Vec<usize> {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(predicted.len() * computed.len());
    for (i, a) in predicted.iter().enumerate() {
        for (j, b) in computed.iter().enumerate() {
            candidates.push(((a - b).norm(), i, j));
        }
    }
    candidates.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then_with(|| lexicographic(&computed[x.2], &computed[y.2]))
            .then_with(|| x.1.cmp(&y.1))
    });
    let mut pairing = vec![usize::MAX; predicted.len()];
    let mut used = vec![false; computed.len()];
    for (_, i, j) in candidates {
        if pairing[i] == usize::MAX && !used[j] {
            pairing[i] = j;
            used[j] = true;
        }
    }
    pairing
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub predicted: Vec<Complex64>,
    pub pairing: Vec<usize>,
    /// `|computed - predicted|` per prediction.
    pub errors: Vec<f64>,
    pub max_abs_error: f64,
}

impl SpectrumReport {
    /// Largest error among the perturbed eigenvalues, i.e. excluding the
    /// exact eigenvalue 1 in slot 0.
    pub fn max_perturbed_error(&self) -> f64 {
        self.errors.iter().skip(1).copied().fold(0.0, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The four-dimensional step (all normal elements alike) with rates `p` on
/// the normal elements and `q` on the target.
pub fn equal_treatment_step(n: usize, p: f64, q: f64) -> Result<Matrix> {
    let spec = ProblemSpec::new(n, 0, NoiseKind::Decoupled, q > 0.0)?;
    Ok(build_step(&spec, &NoiseParams::four_dim(p, q)?)?.evolution_matrix())
}

pub fn verify_perturbation(n: usize, p: f64, q: f64) -> Result<SpectrumReport> {
    let eigenvalues = eigenvalues(&equal_treatment_step(n, p, q)?)?;
    let predicted = predicted_perturbed(n, p, q);
    let pairing = pair_nearest(&predicted, &eigenvalues);
    let errors: Vec<f64> = predicted.iter().zip(&pairing).map(|(z, &j)| (z - eigenvalues[j]).norm()).collect();
    let max_abs_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(SpectrumReport { eigenvalues, predicted, pairing, errors, max_abs_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::initial_state;

    fn assert_spectrum(got: &[Complex64], want: &[Complex64], tol: f64) {
        let mut want = want.to_vec();
        want.sort_by(lexicographic);
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn identity_spectrum() {
        let ev = eigenvalues(&Matrix::identity(4)).unwrap();
        assert_spectrum(&ev, &[Complex64::new(1.0, 0.0); 4], 1e-15);
    }

    #[test]
    fn rotation_block_spectrum() {
        let phi: f64 = 0.7;
        let (c, s) = (phi.cos(), phi.sin());
        let m = Matrix::from_rows(&[[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).unwrap();
        let want = [Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_spectrum(&eigenvalues(&m).unwrap(), &want, 1e-12);
        // double roots limit Durand-Kerner to roughly sqrt(eps) accuracy
        assert_spectrum(&eigenvalues_durand_kerner(&m).unwrap(), &want, 1e-6);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = Matrix::from_rows(&[[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let want: Vec<Complex64> = [1.0, 2.0, 3.0].iter().map(|x| Complex64::new(*x, 0.0)).collect();
        assert_spectrum(&eigenvalues(&m).unwrap(), &want, 1e-12);
        assert_spectrum(&eigenvalues_durand_kerner(&m).unwrap(), &want, 1e-12);
    }

    #[test]
    fn eight_by_eight_permutation() {
        // cyclic shift: eighth roots of unity
        let m = Matrix::from_fn(8, 8, |i, j| if (j + 1) % 8 == i { 1.0 } else { 0.0 });
        let want: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0, core::f64::consts::PI * k as f64 / 4.0)).collect();
        assert_spectrum(&eigenvalues(&m).unwrap(), &want, 1e-12);
    }

    #[test]
    fn rejects_oversized_and_non_square() {
        assert!(eigenvalues(&Matrix::identity(9)).is_err());
        assert!(eigenvalues(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn noiseless_four_dim_spectrum() {
        let n = 50;
        let theta = grover_angle(n);
        let ev = eigenvalues(&equal_treatment_step(n, 0.0, 0.0).unwrap()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let want = [one, one, Complex64::from_polar(1.0, 2.0 * theta), Complex64::from_polar(1.0, -2.0 * theta)];
        assert_spectrum(&ev, &want, 1e-10);
    }

    #[test]
    fn unperturbed_eigenvectors_are_orthonormal_and_have_stated_overlaps() {
        let n = 37;
        let vs = unperturbed_eigenvectors(n).unwrap();
        let all = vs.all();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner(all[i], all[j]) - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        let spec = ProblemSpec::new(n, 0, NoiseKind::Decoupled, true).unwrap();
        let init: Vec<Complex64> = initial_state(&spec).coeffs().iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let nf = n as f64;
        let r = 1.0 - 2.0 / nf;
        let theta = grover_angle(n);
        assert!((inner(&vs.nu1, &init).norm() - 1.0 / nf.sqrt()).abs() < 1e-12);
        assert!((inner(&vs.nu2, &init).norm() - (r / 2.0).sqrt()).abs() < 1e-12);
        // modulus 1/2; with these phase conventions the overlaps are -e^{±iθ}/2
        let plus = inner(&vs.nu_plus, &init);
        let minus = inner(&vs.nu_minus, &init);
        assert!((plus + Complex64::from_polar(0.5, theta)).norm() < 1e-12, "{plus}");
        assert!((minus + Complex64::from_polar(0.5, -theta)).norm() < 1e-12, "{minus}");
    }

    #[test]
    fn unperturbed_eigenvectors_are_eigenvectors() {
        let n = 37;
        let u = equal_treatment_step(n, 0.0, 0.0).unwrap();
        let vs = unperturbed_eigenvectors(n).unwrap();
        let theta = grover_angle(n);
        let apply = |v: &[Complex64]| -> Vec<Complex64> {
            (0..4).map(|i| (0..4).map(|j| v[j] * u[(i, j)]).sum()).collect()
        };
        for (v, lambda) in [
            (&vs.nu1, Complex64::new(1.0, 0.0)),
            (&vs.nu2, Complex64::new(1.0, 0.0)),
            (&vs.nu_plus, Complex64::from_polar(1.0, 2.0 * theta)),
            (&vs.nu_minus, Complex64::from_polar(1.0, -2.0 * theta)),
        ] {
            let uv = apply(v);
            for (a, b) in uv.iter().zip(v.iter()) {
                assert!((a - lambda * b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn predicted_values() {
        let ev = predicted_perturbed(1000, 1e-3, 0.0);
        assert!((ev[1].re - (1.0 - 1000.0 / 999.0 * 1e-3)).abs() < 1e-16);
        assert_eq!(ev[0], Complex64::new(1.0, 0.0));
        let unperturbed = predicted_perturbed(1000, 0.0, 0.0);
        assert_eq!(unperturbed[1], Complex64::new(1.0, 0.0));
        assert!((unperturbed[2].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn perturbation_report_at_n1000() {
        let rep = verify_perturbation(1000, 1e-3, 0.0).unwrap();
        assert!(rep.max_abs_error < 1e-5, "{rep:?}");
        assert!(rep.spectral_radius() <= 1.0 + 1e-10);
    }

    #[test]
    fn target_rate_leaves_unit_eigenvalues_alone() {
        let rep = verify_perturbation(1000, 0.0, 1e-3).unwrap();
        assert!(rep.errors[0] < 1e-12 && rep.errors[1] < 1e-12, "{rep:?}");
    }

    #[test]
    fn pairing_prefers_closest() {
        let pred = [Complex64::new(1.0, 0.0), Complex64::new(0.9, 0.0)];
        let comp = [Complex64::new(0.91, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(pair_nearest(&pred, &comp), vec![1, 0]);
    }
}
