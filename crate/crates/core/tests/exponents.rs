//! Log-log slopes: cost against `N`, spectral error against `p`.

use grover_dephasing::metrics::{fit_exponent, fit_power_law, scaling_scan, GridConfig, KRule, StoppingMode};
use grover_dephasing::spectral::verify_perturbation;
use grover_dephasing::NoiseKind;

fn target_noise_beta(q: f64, mode: StoppingMode, n_values: Vec<usize>) -> f64 {
    let mut config = GridConfig::new(KRule::Fixed(0), 0.0, q, NoiseKind::Decoupled, mode);
    config.n_values = n_values;
    fit_exponent(&scaling_scan(&config)).unwrap().beta
}

#[test]
fn constant_target_noise_costs_at_least_linear_time() {
    let modes = [StoppingMode::FixedM0, StoppingMode::Minimized];
    for mode in modes {
        let beta = target_noise_beta(1.0, mode, GridConfig::default_grid());
        assert!(beta >= 0.9, "{mode:?}: {beta}");
    }
    // weaker rates need N well beyond 1/q² before the slope settles
    let large: Vec<usize> = (12..=24).map(|i| 1usize << i).collect();
    for q in [0.3, 0.5, 1.0] {
        for mode in modes {
            let beta = target_noise_beta(q, mode, large.clone());
            assert!(beta >= 0.9, "q={q} {mode:?}: {beta}");
        }
    }
}

#[test]
fn perturbation_error_is_second_order() {
    let data: Vec<(f64, f64)> = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
        .iter()
        .map(|&p| (p, verify_perturbation(1000, p, 0.0).unwrap().max_abs_error))
        .collect();
    let (slope, _, _) = fit_power_law(&data).unwrap();
    assert!((slope - 2.0).abs() <= 0.3, "{slope}");
    // doubling p roughly quadruples the error
    let e = |p| verify_perturbation(1000, p, 0.0).unwrap().max_abs_error;
    let ratio = e(2e-3) / e(1e-3);
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}
