use std::path::Path;
use std::process::{Command, Output};

use grover_dephasing_cli::config::{DensityConfig, Kind, Mode, ScalingConfig, SpectrumConfig, TraceConfig, WalkConfig};
use grover_dephasing_cli::{execute, ExperimentConfig, RunContext};
use proptest::prelude::*;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grover-dephasing")).args(args).env_remove("GROVER_MAX_FULL_N").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_prints_csv_and_report() {
    let o = bin(&["simulate", "--n", "64", "--k", "5", "--kind", "coupled", "--p", "0.01", "--steps", "10", "--full"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "m,p_full,p_reduced,p_analytic");
    assert_eq!(lines.count(), 11);
    assert!(!out.contains('\r'));
    let meta: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["summary"]["basis"], "coupled-6");
}

#[test]
fn output_file_gets_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = bin(&["scaling", "--grid", "2^6..2^9", "--mode", "minimized", "-o", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("N,k,p,q,kind,mode,m_used,mbar\n64,0,0,0,decoupled,minimized,"));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.fit.json")).unwrap()).unwrap();
    assert!((fit["beta"].as_f64().unwrap() - 0.5).abs() < 0.05);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["grid"], "2^6..2^9");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn failed_grid_points_leave_empty_cells() {
    let o = bin(&["scaling", "--grid", "2,64,128,256", "--p", "0.1", "--k", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().nth(1).unwrap(), "2,1,0.1,0,decoupled,fixed_m0,,");
}

#[test]
fn exit_codes() {
    // configuration errors
    assert_eq!(bin(&["simulate", "--n", "64"]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "--n", "3", "--steps", "2"]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "--n", "64", "--steps", "2", "--p", "1.5"]).status.code(), Some(2));
    let o = bin(&["simulate", "--n", "64", "--steps", "2", "--q", "0.1", "--target-noisy"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("target_noisy"));
    let o = bin(&["simulate", "--config", "/nonexistent/c.json"]);
    assert_eq!(o.status.code(), Some(2));
    // resource cap
    let o = bin(&["compare", "--n", "600", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_grover-dephasing"))
        .args(["compare", "--n", "600", "--steps", "2"])
        .env("GROVER_MAX_FULL_N", "700")
        .output()
        .unwrap();
    assert!(o.status.success());
    // the reduced model alone has no cap
    assert!(bin(&["simulate", "--n", "100000", "--steps", "2"]).status.success());
}

#[test]
fn walk_csv_is_byte_identical_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = bin(&["walk", "--n", "16", "--k", "3", "--steps", "6", "--shots", "200", "--seed", "7", "-o", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("m,p_full,p_reduced,p_mc,stderr\n"));
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    std::fs::write(&path, r#"{"command": "spectrum", "n": 1000, "p": 0.001}"#).unwrap();
    let o = bin(&["spectrum", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let body: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(body["eigenvalues"].as_array().unwrap().len(), 4);
    assert!(body["max_perturbed_error"].as_f64().unwrap() < 1e-5);
}

#[test]
fn execute_is_deterministic_across_commands() {
    let ctx = RunContext::default();
    let configs = [
        ExperimentConfig::from_json(r#"{"command":"compare","n":40,"k":7,"p":0.2,"steps":30}"#).unwrap(),
        ExperimentConfig::from_json(r#"{"command":"scaling","grid":"2^6..2^10","mu":0.5,"p":0.1,"mode":"minimized"}"#)
            .unwrap(),
        ExperimentConfig::from_json(r#"{"command":"walk","n":12,"faulty":[2,5],"steps":5,"shots":50,"seed":3}"#)
            .unwrap(),
    ];
    for config in configs {
        let a = execute(&config, &ctx).unwrap();
        let b = execute(&config, &ctx).unwrap();
        assert_eq!(a, b);
    }
}

fn output_path() -> impl Strategy<Value = Option<std::path::PathBuf>> {
    proptest::option::of("[a-z]{1,8}\\.csv".prop_map(|s| Path::new("out").join(s)))
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Coupled), Just(Kind::Decoupled)]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let trace = || (4usize..10_000, 0usize..100, kind(), any::<bool>(), 0.0..1.0f64, 0.0..1.0f64, 0usize..1000, any::<bool>(), output_path())
        .prop_map(|(n, k, kind, target_noisy, p, q, steps, full, output)| TraceConfig {
            n,
            k,
            kind,
            target_noisy,
            p,
            q,
            steps,
            full,
            output,
        });
    let spectrum = (4usize..10_000, 0.0..1.0f64, 0.0..1.0f64, output_path())
        .prop_map(|(n, p, q, output)| SpectrumConfig { n, p, q, output });
    let scaling = (
        proptest::option::of(0usize..50),
        proptest::option::of(0.0..1.0f64),
        0.0..1.0f64,
        0.0..1.0f64,
        kind(),
        prop_oneof![Just(Mode::FixedM0), Just(Mode::Minimized)],
        0.5..10.0f64,
    )
        .prop_map(|(k, mu, p, q, kind, mode, window)| ScalingConfig {
            grid: "2^6..2^12".into(),
            k,
            mu,
            p,
            q,
            kind,
            mode,
            window,
            output: None,
        });
    let density = prop_oneof![
        (0.0..3.0f64).prop_map(|a| DensityConfig::Uniform { a }),
        (-3.0..3.0f64).prop_map(|phi| DensityConfig::PointMass { phi }),
        (0.1..3.0f64, proptest::collection::vec(0.0..1.0f64, 3..9), any::<bool>())
            .prop_map(|(a, values, normalize)| DensityConfig::Custom { a, values, normalize }),
    ];
    let walk = (4usize..500, 0usize..10, proptest::option::of(proptest::collection::vec(1usize..500, 0..5)), density, 0usize..100, 0usize..10_000, any::<u64>())
        .prop_map(|(n, k, faulty, density, steps, shots, seed)| WalkConfig { n, k, faulty, density, steps, shots, seed, output: None });
    prop_oneof![
        trace().prop_map(ExperimentConfig::Simulate),
        trace().prop_map(ExperimentConfig::Compare),
        spectrum.prop_map(ExperimentConfig::Spectrum),
        scaling.prop_map(ExperimentConfig::Scaling),
        walk.prop_map(ExperimentConfig::Walk),
    ]
}

proptest! {
    #[test]
    fn config_json_round_trips(c in config()) {
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }
}
