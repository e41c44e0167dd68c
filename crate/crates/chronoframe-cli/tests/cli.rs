use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use chronoframe_cli::config::{self, HamiltonianConfig, HamiltonianPreset};
use chronoframe_cli::{
    load_config, parse_config, run, run_points, CheckLevel, ConfigError, Format, RunError, RunOptions,
};

const SIGNALING: &str = r#"
name = "s"
experiment = "signaling"

[system]
hamiltonian = "interacting"

[[kicks]]
clock = "C"
generator = "hadamard"
target = "A"

[measurement]
target = "B"

[times]
t_f = 0.7853981633974483
"#;

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

fn csv(text: &str, opts: &RunOptions) -> String {
    let cfg = parse_config(text).unwrap();
    let mut out = Vec::new();
    assert!(run(&cfg, opts, &mut out).unwrap());
    String::from_utf8(out).unwrap()
}

#[test]
fn defaults_fill_in_a_single_clock() {
    let cfg = parse_config(SIGNALING).unwrap();
    assert_eq!(cfg.clocks.len(), 1);
    assert_eq!(cfg.clocks[0].label, "C");
    assert_eq!(cfg.clocks[0].d, 64);
    assert_eq!(cfg.clocks[0].dt(), 2.0 * PI / 64.0);
    assert_eq!(cfg.system.factors.len(), 2);
    assert_eq!(cfg.system.hamiltonian, HamiltonianConfig::Preset(HamiltonianPreset::Interacting));
}

#[test]
fn signaling_row_at_quarter_period() {
    let out = csv(SIGNALING, &RunOptions::default());
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t_f,p_plus_y_none,p_plus_y_hadamard"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], PI / 4.0);
    assert!((row[1] - 0.5).abs() < 1e-12);
    assert!(row[2].abs() < 1e-12);
    assert_eq!(lines.next(), None);
}

#[test]
fn interacting_preset_is_xx() {
    let dir = tempfile::tempdir().unwrap();
    let re = [[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]];
    std::fs::write(dir.path().join("xx.json"), serde_json::json!({ "re": re }).to_string()).unwrap();
    let text = SIGNALING.replace("hamiltonian = \"interacting\"", "hamiltonian = { file = \"xx.json\" }");
    let path = dir.path().join("custom.toml");
    std::fs::write(&path, text).unwrap();
    let custom = load_config(&path).unwrap();
    let preset = parse_config(SIGNALING).unwrap();
    let opts = RunOptions::default();
    let (a, b) = (run_points(&custom, &opts).unwrap(), run_points(&preset, &opts).unwrap());
    assert_eq!(a[0].rows, b[0].rows);
}

#[test]
fn off_grid_time_is_reported_with_its_value() {
    let text = SIGNALING.replace("generator = \"hadamard\"", "generator = \"hadamard\"\ntau = 0.05");
    match parse_config(&text) {
        Err(ConfigError::OffGridTime { field, value }) => {
            assert_eq!(field, "kicks[0].tau");
            assert_eq!(value, 0.05);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_field_names_its_path() {
    let text = SIGNALING.replace("target = \"B\"", "target = \"B\"\nbasys = \"x\"");
    assert_eq!(parse_config(&text), Err(ConfigError::UnknownField("measurement.basys".into())));
}

#[test]
fn unknown_kick_target_is_rejected() {
    let text = SIGNALING.replace("target = \"A\"", "target = \"Q\"");
    assert!(matches!(parse_config(&text), Err(ConfigError::Invalid { field, .. }) if field == "kicks[0].target"));
}

#[test]
fn toml_round_trip() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let mut cfg = load_config(&path).unwrap();
        cfg.base_dir = None;
        let back = parse_config(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg, "{}", path.display());
    }
}

#[test]
fn schema_file_is_current() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/scenario.schema.json");
    let on_disk: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(on_disk, config::schema());
}

#[test]
fn example_configs_pass_their_checks() {
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = load_config(&path).unwrap();
        let outs = run_points(&cfg, &RunOptions::default()).unwrap();
        for o in &outs {
            assert!(o.record.passed, "{}: {:?}", path.display(), o.record.checks);
        }
    }
}

#[test]
fn full_checks_pass_for_signaling() {
    let cfg = parse_config(SIGNALING).unwrap();
    let opts = RunOptions { check_level: CheckLevel::Full, ..RunOptions::default() };
    let outs = run_points(&cfg, &opts).unwrap();
    let checks = &outs[0].record.checks;
    assert!(checks.iter().any(|c| c.name.contains("constraint path")));
    assert!(checks.iter().any(|c| c.name.contains("group average")));
    assert!(outs[0].record.passed, "{checks:?}");
}

#[test]
fn clock_dim_override_keeps_the_period() {
    let cfg = parse_config(SIGNALING).unwrap();
    let opts = RunOptions { clock_dim: Some(16), ..RunOptions::default() };
    let outs = run_points(&cfg, &opts).unwrap();
    let p = outs[0].record.result["distributions"]["hadamard"]["probs"][0].as_f64().unwrap();
    assert!(p.abs() < 1e-12 || (p - 1.0).abs() < 1e-12);
}

#[test]
fn thread_count_does_not_change_output() {
    let text = std::fs::read_to_string(configs_dir().join("signaling.toml")).unwrap();
    let one = RunOptions { threads: Some(1), format: Format::Json, ..RunOptions::default() };
    let four = RunOptions { threads: Some(4), ..one.clone() };
    assert_eq!(csv(&text, &one), csv(&text, &four));
}

#[test]
fn random_generator_follows_the_seed() {
    let text = std::fs::read_to_string(configs_dir().join("signaling_independent.toml")).unwrap();
    let cfg = parse_config(&text).unwrap();
    let rows = |seed| run_points(&cfg, &RunOptions { seed, ..RunOptions::default() }).unwrap()[0].record.clone();
    assert_eq!(rows(7), rows(7));
    assert_ne!(rows(7).result["distributions"]["random"], rows(8).result["distributions"]["random"]);
    assert_eq!(rows(8).result["verdict"], "no-signaling");
}

#[test]
fn engine_error_exit_codes() {
    let engine = |source| RunError::Engine { scenario: "s".into(), point: "p".into(), source };
    assert_eq!(RunError::from(ConfigError::UnknownField("x".into())).exit_code(), 2);
    assert_eq!(engine(chronoframe::Error::NotPositive(-1.0)).exit_code(), 1);
    assert_eq!(engine(chronoframe::Error::NoPhysicalStates(1e-9)).exit_code(), 1);
    assert_eq!(engine(chronoframe::Error::GuardGapViolation(8.0)).exit_code(), 2);
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chronoframe")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let good = configs_dir().join("sync_scan.toml");
    assert_eq!(binary(&["run", good.to_str().unwrap()]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, SIGNALING.replace("[times]", "[times]\nt_i = 0.0")).unwrap();
    let out = binary(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("times.t_i"));
}

#[test]
fn binary_writes_json_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let cfg = configs_dir().join("reversed_order.toml");
    let status = binary(&["run", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let records: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 3);
    assert_eq!(records[1]["experiment"], "reversed_order");
    assert!(records[1]["result"]["distance_c2"].as_f64().unwrap() < 0.05);
}

#[test]
fn unknown_top_level_field() {
    let text = SIGNALING.replace("name = \"s\"", "name = \"s\"\nseed = 3");
    assert_eq!(parse_config(&text), Err(ConfigError::UnknownField("seed".into())));
}
