use grover_dephasing::analytics::{approx_coupled, approx_decoupled_general, approx_equal_treatment};
use grover_dephasing::linalg::{jacobi_svd, Matrix};
use grover_dephasing::reduced::{build_step, initial_state, trajectory};
use grover_dephasing::spectral::eigenvalues;
use grover_dephasing::{BasisKind, NoiseKind, NoiseParams, ProblemSpec};
use proptest::prelude::*;

fn problem() -> impl Strategy<Value = (ProblemSpec, f64, f64)> {
    (4usize..400, any::<bool>(), any::<bool>(), 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(
        |(n, decoupled, target_noisy, frac, p, q)| {
            let k = ((n - 1) as f64 * frac).round() as usize;
            let kind = if decoupled { NoiseKind::Decoupled } else { NoiseKind::Coupled };
            (ProblemSpec::new(n, k, kind, target_noisy).unwrap(), p, q)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_is_preserved((spec, p, q) in problem()) {
        let noise = NoiseParams::with_target_rate(&spec, p, q).unwrap();
        for state in trajectory(&spec, &noise, 50).unwrap() {
            prop_assert!((state.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_unitary_is_orthogonal((spec, _, _) in problem()) {
        let step = build_step(&spec, &NoiseParams::ZERO).unwrap();
        let u = step.unitary_matrix();
        let gram = u.transpose().matmul(u).unwrap();
        prop_assert!(gram.max_abs_diff(&Matrix::identity(u.rows())) < 1e-12);
    }

    #[test]
    fn spectral_radius_at_most_one((spec, p, q) in problem()) {
        let noise = NoiseParams::with_target_rate(&spec, p, q).unwrap();
        let e = build_step(&spec, &noise).unwrap().evolution_matrix();
        for z in eigenvalues(&e).unwrap() {
            prop_assert!(z.norm() <= 1.0 + 1e-10, "{z}");
        }
    }

    #[test]
    fn success_probability_is_a_probability((spec, p, q) in problem()) {
        let noise = NoiseParams::with_target_rate(&spec, p, q).unwrap();
        for state in trajectory(&spec, &noise, 50).unwrap() {
            let s = state.success_probability();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        }
    }

    #[test]
    fn coupled_all_normals_equals_target_only_case(n in 8usize..5000, p in 0.0..0.2f64, m in 0usize..200) {
        let a = approx_coupled(n, n - 1, p, m).unwrap().value;
        let b = approx_equal_treatment(n, 0.0, p, m).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn decoupled_all_normals_tracks_equal_treatment(n in 64usize..5000, p in 0.0..0.01f64, q in 0.0..0.01f64, m in 0usize..200) {
        // identical periodic factor; constant and decaying terms differ at O(1/N²)
        let a = approx_decoupled_general(n, n - 1, p, q, m).unwrap().value;
        let b = approx_equal_treatment(n, p, q, m).unwrap().value;
        let nf = n as f64;
        prop_assert!((a - b).abs() < 2.0 / (nf * nf), "{}", (a - b).abs());
    }
}

fn krylov_rank(e: &Matrix, start: &[f64]) -> usize {
    let dim = e.rows();
    let mut columns = vec![start.to_vec()];
    for _ in 1..dim {
        let next = e.mul_vec(columns.last().unwrap()).unwrap();
        columns.push(next);
    }
    let k = Matrix::from_columns(&columns).unwrap();
    let (sigma, _) = jacobi_svd(&k);
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    sigma.iter().filter(|s| **s > 1e-10 * largest).count()
}

#[test]
fn initial_state_misses_one_conjugate_pair_in_coupled_basis() {
    // six eigenvalues: 1, 1 and two conjugate pairs. The Krylov space of the
    // initial state has one direction per reached eigenvalue: 1 and a single
    // pair, so rank 3 with the other pair untouched
    for (n, k) in [(20usize, 5usize), (64, 1), (101, 40)] {
        let spec = ProblemSpec::new(n, k, NoiseKind::Coupled, false).unwrap();
        assert_eq!(spec.basis_kind(), BasisKind::Coupled6);
        let u = build_step(&spec, &NoiseParams::ZERO).unwrap().evolution_matrix();
        let ev = eigenvalues(&u).unwrap();
        let complex = ev.iter().filter(|z| z.im.abs() > 1e-9).count();
        assert_eq!(complex, 4, "{ev:?}");
        assert_eq!(krylov_rank(&u, initial_state(&spec).coeffs()), 3);
    }
}
