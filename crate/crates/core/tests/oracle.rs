//! The reduced propagator against the exact `N x N` simulation.

use grover_dephasing::analytics::{grover_success, optimal_steps};
use grover_dephasing::full::{project_to_sigma, FullSimulator, NoiseConfig};
use grover_dephasing::reduced::{evolve, trajectory};
use grover_dephasing::{BasisKind, NoiseKind, NoiseParams, ProblemSpec};

const KINDS: [NoiseKind; 2] = [NoiseKind::Coupled, NoiseKind::Decoupled];

fn scenarios() -> impl Iterator<Item = (ProblemSpec, f64)> {
    [8usize, 16, 32, 64].into_iter().flat_map(|n| {
        [1usize, 2, 5].into_iter().flat_map(move |k| {
            KINDS.into_iter().flat_map(move |kind| {
                [false, true].into_iter().flat_map(move |target_noisy| {
                    [0.0, 0.05, 0.3]
                        .into_iter()
                        .map(move |rate| (ProblemSpec::new(n, k, kind, target_noisy).unwrap(), rate))
                })
            })
        })
    })
}

#[test]
fn reduced_matches_full_on_the_grid() {
    let sim = FullSimulator::default();
    for (spec, rate) in scenarios() {
        let n = spec.n_elements();
        let full = sim.evolve(n, &NoiseConfig::for_problem(&spec, rate).unwrap(), 200).unwrap();
        let reduced = evolve(&spec, &NoiseParams::for_problem(&spec, rate).unwrap(), 200).unwrap();
        let diff = full.max_abs_diff(&reduced);
        assert!(diff < 1e-10, "{spec:?} rate {rate}: {diff}");
    }
}

#[test]
fn full_state_stays_in_sigma_span() {
    let sim = FullSimulator::default();
    for (spec, rate) in scenarios().filter(|(s, _)| s.n_elements() <= 32) {
        let noise = NoiseParams::for_problem(&spec, rate).unwrap();
        let states = trajectory(&spec, &noise, 60).unwrap();
        sim.run(spec.n_elements(), &NoiseConfig::for_problem(&spec, rate).unwrap(), 60, |m, rho| {
            let (sigma, residual) = project_to_sigma(rho, &spec).unwrap();
            assert!(residual < 1e-10, "{spec:?} m={m}: residual {residual}");
            for (a, b) in sigma.coeffs().iter().zip(states[m].coeffs()) {
                assert!((a - b).abs() < 1e-10);
            }
        })
        .unwrap();
    }
}

#[test]
fn target_rate_on_top_of_normal_noise() {
    let sim = FullSimulator::default();
    for kind in KINDS {
        for (n, k) in [(16usize, 0usize), (16, 1), (16, 4), (16, 15), (24, 7)] {
            let spec = ProblemSpec::new(n, k, kind, true).unwrap();
            let (p, q) = (0.07, 0.2);
            let set: Vec<usize> = (1..=k).collect();
            let config = NoiseConfig::new(kind, &set, p).unwrap().with_target_rate(q).unwrap();
            let full = sim.evolve(n, &config, 120).unwrap();
            let reduced = evolve(&spec, &NoiseParams::with_target_rate(&spec, p, q).unwrap(), 120).unwrap();
            assert!(full.max_abs_diff(&reduced) < 1e-10, "{kind:?} N={n} k={k}");
        }
    }
}

#[test]
fn coupled_and_general_bases_agree_when_both_apply() {
    // decoupled noise confined to the target: the noisy block never dephases
    // inside itself, so the coupled basis may describe it too
    for (n, k) in [(12usize, 3usize), (30, 8)] {
        let general = ProblemSpec::new(n, k, NoiseKind::Decoupled, true).unwrap();
        let coupled = ProblemSpec::new(n, k, NoiseKind::Coupled, true).unwrap();
        assert_eq!(general.basis_kind(), BasisKind::General7);
        assert_eq!(coupled.basis_kind(), BasisKind::Coupled6);
        let q = 0.15;
        let a = evolve(&general, &NoiseParams::with_target_rate(&general, 0.0, q).unwrap(), 100).unwrap();
        let b = evolve(&coupled, &NoiseParams::with_target_rate(&coupled, 0.0, q).unwrap(), 100).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn noiseless_simulators_follow_the_grover_curve() {
    let sim = FullSimulator::default();
    for n in 4..=128usize {
        let steps = 3 * optimal_steps(n).real.ceil() as usize;
        let full = sim.evolve(n, &NoiseConfig::noiseless(), steps).unwrap();
        for k in [0, 1, n / 2, n - 1] {
            let spec = ProblemSpec::new(n, k, NoiseKind::Decoupled, false).unwrap();
            let reduced = evolve(&spec, &NoiseParams::ZERO, steps).unwrap();
            for m in 0..=steps {
                let g = grover_success(n, m);
                assert!((reduced.at(m).unwrap() - g).abs() < 1e-12, "reduced N={n} k={k} m={m}");
                assert!((full.at(m).unwrap() - g).abs() < 1e-12, "full N={n} m={m}");
            }
        }
    }
    let spec = ProblemSpec::new(4, 1, NoiseKind::Coupled, false).unwrap();
    assert!((evolve(&spec, &NoiseParams::ZERO, 1).unwrap().at(1).unwrap() - 1.0).abs() < 1e-15);
}
