use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use volterra_cli::config::parse_config;

const SIMULATE: &str = r#"
[run]
horizon = 10
seed = 7

[kernel]
type = "finite"
coefficients = []

[nonlinearity]
type = "signed-power"
alpha = 0.5

[forcing]
type = "monotone-power"
mu = 1
"#;

const NEEDS_ZERO_TOLERANCE: &str = r#"
[suite]
default = false

[[scenario]]
name = "growth-exact"
theorem = "growth-up"
horizons = [100, 1000]
tolerance = 0.0
kernel = { type = "geometric", c = 1.0, rho = 0.5 }
nonlinearity = { type = "signed-power", alpha = 0.5 }
forcing = { type = "monotone-power", mu = 1.2 }
"#;

fn volterra(dir: &Path, config: &str, args: &[&str]) -> Output {
    let file = dir.join("run.toml");
    fs::write(&file, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_volterra"))
        .args(args)
        .arg("--config")
        .arg(&file)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove("VOLTERRA_OUT_DIR")
        .output()
        .unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    rows.filter_map(|r| r.split(',').nth(col).filter(|v| !v.is_empty()).map(|v| v.parse().unwrap()))
        .collect()
}

#[test]
fn minimal_config_is_valid() {
    let text = r#"
[run]
horizon = 100
[kernel]
type = "finite"
coefficients = []
[nonlinearity]
type = "signed-power"
alpha = 0.5
[forcing]
type = "gaussian-iid"
sigma = 1.0
"#;
    let parsed = parse_config(text, true).unwrap();
    assert!(parsed.warnings.is_empty());
    assert_eq!(parsed.config.run.horizon, Some(100));
}

#[test]
fn misspelled_section_is_named() {
    let err = parse_config("[kernell]\ntype = \"finite\"\n", true).unwrap_err();
    assert_eq!(err.0.len(), 1);
    assert_eq!(err.0[0].line, Some(1));
    assert!(err.0[0].message.contains("kernell"), "{}", err.0[0].message);
    assert!(err.0[0].message.contains("kernel"));
}

#[test]
fn invalid_kernel_parameter_is_rejected() {
    let err = parse_config("[kernel]\ntype = \"geometric\"\nc = 1.0\nrho = 1.5\n", true).unwrap_err();
    assert!(err.0.iter().any(|i| i.message.contains("rho")), "{err}");
}

#[test]
fn permissive_mode_warns_instead() {
    let text = "[kernel]\ntype = \"finite\"\ncoefficients = []\nextra = 3\n";
    assert!(parse_config(text, true).is_err());
    let parsed = parse_config(text, false).unwrap();
    assert_eq!(parsed.warnings.len(), 1);
    assert!(parsed.warnings[0].message.contains("kernel.extra"));
}

#[test]
fn simulate_null_kernel_passes_forcing_through() {
    let dir = TempDir::new().unwrap();
    let out = volterra(dir.path(), SIMULATE, &["simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("out/path.csv")).unwrap();
    let x = csv_column(&table, "x");
    let h = csv_column(&table, "H");
    assert_eq!(x.len(), 11);
    for n in 1..=10 {
        assert_eq!(x[n], n as f64);
    }
    assert_eq!(h, (1..=10).map(|n| n as f64).collect::<Vec<_>>());
}

#[test]
fn replayed_forcing_reproduces_path() {
    let dir = TempDir::new().unwrap();
    let config = SIMULATE.replace("type = \"finite\"\ncoefficients = []", "type = \"geometric\"\nc = 1.0\nrho = 0.5");
    assert!(volterra(dir.path(), &config, &["simulate"]).status.success());
    let first = fs::read_to_string(dir.path().join("out/path.csv")).unwrap();
    let saved = dir.path().join("first.csv");
    fs::write(&saved, &first).unwrap();
    let out = volterra(dir.path(), &config, &["simulate", "--replay", saved.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let second = fs::read_to_string(dir.path().join("out/path.csv")).unwrap();
    assert_eq!(csv_column(&first, "x"), csv_column(&second, "x"));
}

#[test]
fn diagnose_writes_tracks_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = volterra(dir.path(), SIMULATE, &["diagnose"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tracks = fs::read_to_string(dir.path().join("out/tracks.csv")).unwrap();
    assert_eq!(csv_column(&tracks, "x_star").last(), Some(&10.0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn verify_subset_passes_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let config = "[suite]\nonly = [\"growth-up-power\", \"modulated-exponential\"]\n";
    let out = volterra(dir.path(), config, &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read(dir.path().join("out/report.jsonl")).unwrap();
    let text = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(text.contains("2 pass, 0 fail"), "{text}");
    assert!(volterra(dir.path(), config, &["verify"]).status.success());
    assert_eq!(first, fs::read(dir.path().join("out/report.jsonl")).unwrap());
}

#[test]
fn verify_exits_one_on_failed_check() {
    let dir = TempDir::new().unwrap();
    let out = volterra(dir.path(), NEEDS_ZERO_TOLERANCE, &["verify"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.jsonl")).unwrap();
    assert!(report.lines().any(|l| l.contains("growth-exact") && l.contains("\"fail\"")), "{report}");
}

#[test]
fn sweep_writes_one_report_per_value() {
    let dir = TempDir::new().unwrap();
    let config = "[sweep]\nscenario = \"growth-up-power\"\nparameter = \"nonlinearity.alpha\"\nvalues = [0.3, 0.5, 0.7]\n";
    let out = volterra(dir.path(), config, &["sweep"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for i in 0..3 {
        assert!(dir.path().join(format!("out/sweep-{i:03}.jsonl")).exists());
    }
}

#[test]
fn bad_config_exits_two_listing_every_problem() {
    let dir = TempDir::new().unwrap();
    let config = "[kernell]\nx = 1\n[nonlinearity]\ntype = \"signed-power\"\nalpha = \"x\"\n";
    let out = volterra(dir.path(), config, &["simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1: unknown key `kernell`") && err.contains("line 3: [nonlinearity]"), "{err}");
}
