//! Command-line behaviour: exit codes, output files, the precomputed
//! factor-set mode and failure cleanup.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biovalent"))
}

fn copy_fixtures(target: &Path) {
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), target.join(entry.file_name())).unwrap();
    }
}

#[test]
fn run_writes_all_reports() {
    let out = tempfile::tempdir().unwrap();
    let status = binary()
        .args(["run", "--config"])
        .arg(fixture_dir().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{status:?}");
    let mut names: Vec<String> = fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "factors.csv",
            "footprint_categories.csv",
            "footprint_lines.csv",
            "quadrant.svg",
            "statement.csv",
        ]
    );
}

#[test]
fn run_in_json_mode_switches_report_extensions() {
    let out = tempfile::tempdir().unwrap();
    let status = binary()
        .args(["run", "--format", "json", "--config"])
        .arg(fixture_dir().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(out.path().join("statement.json").exists());
    assert!(out.path().join("footprint_categories.json").exists());
    let text = fs::read_to_string(out.path().join("statement.json")).unwrap();
    serde_json::from_str::<serde_json::Value>(&text).unwrap();
}

#[test]
fn missing_characterization_file_names_the_path() {
    let work = tempfile::tempdir().unwrap();
    copy_fixtures(work.path());
    fs::remove_file(work.path().join("characterization.csv")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let result = binary()
        .args(["run", "--config"])
        .arg(work.path().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("characterization.csv"), "{stderr}");
    assert!(stderr.contains("stage factors"), "{stderr}");
}

#[test]
fn failed_run_removes_partial_outputs() {
    let work = tempfile::tempdir().unwrap();
    copy_fixtures(work.path());
    // factors build fine, the footprint stage then fails on the ledger
    fs::remove_file(work.path().join("ledger.csv")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let result = binary()
        .args(["run", "--config"])
        .arg(work.path().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(!result.status.success());
    let leftovers: Vec<_> = fs::read_dir(out.path()).unwrap().collect();
    assert!(leftovers.is_empty(), "partial outputs left behind");
}

#[test]
fn precomputed_factor_set_skips_the_mrio_stage() {
    let work = tempfile::tempdir().unwrap();
    copy_fixtures(work.path());

    // export the factor set once, from the full inputs
    let status = binary()
        .args(["factors", "--config"])
        .arg(work.path().join("biovalent.toml"))
        .arg("--out")
        .arg(work.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{status:?}");
    assert!(work.path().join("factors.csv").exists());

    // drop every MRIO input; only the ledger side remains
    for name in ["flows.csv", "final_demand.csv", "satellite.csv"] {
        fs::remove_file(work.path().join(name)).unwrap();
    }
    let config = r#"
base_year = 2019

[factors]
precomputed = "factors.csv"

[ledger]
file = "ledger.csv"
mapping = "account_mapping.csv"
inflation = "inflation.csv"
basic_prices = "basic_prices.csv"

[statement]
[[statement.revenue]]
name = "Public funding"
amount_eur = 60000000.0

[[scenario]]
name = "finland"
country = "Finland"
c0 = 2.65e-17
t_rec = 100.0
horizon_years = 30.0
land_price_eur_per_ha = 7548.0
carbon_price = 96.0
fx_rate = 0.9665
"#;
    fs::write(work.path().join("precomputed.toml"), config).unwrap();

    let out = tempfile::tempdir().unwrap();
    let result = binary()
        .args(["run", "--config"])
        .arg(work.path().join("precomputed.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(out.path().join("statement.csv").exists());
}

#[test]
fn statement_scenario_selection() {
    let out = tempfile::tempdir().unwrap();
    let ok = binary()
        .args(["statement", "--scenario", "brazil", "--config"])
        .arg(fixture_dir().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    let text = fs::read_to_string(out.path().join("statement.csv")).unwrap();
    assert!(text.contains("Brazil"));
    assert!(!text.contains("Finland"));

    let missing = binary()
        .args(["statement", "--scenario", "atlantis", "--config"])
        .arg(fixture_dir().join("biovalent.toml"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("atlantis"));
}

#[test]
fn validate_reports_inputs() {
    let result = binary()
        .args(["validate", "--config"])
        .arg(fixture_dir().join("biovalent.toml"))
        .output()
        .unwrap();
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("factor set"), "{stdout}");
    assert!(stdout.contains("ledger"), "{stdout}");
    assert!(stdout.trim_end().ends_with("ok"), "{stdout}");
}
