use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn monogamy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn theorem_campaign_passes_and_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let o = monogamy(&[
        "verify-theorem", "--samples", "1000", "--seed", "1",
        "--out", out.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,sample_index,residual_conc,residual_cren,residual_neg"));
    assert_eq!(lines.count(), 1000);
    let s: serde_json::Value = serde_json::from_str(&read(&summary)).unwrap();
    assert_eq!(s["result"]["violations"], 0);
    assert!(s["result"]["min_residual_conc"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn csv_floats_round_trip() {
    let o = monogamy(&["verify-theorem", "--samples", "3", "--seed", "4"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let field = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    let v: f64 = field.parse().unwrap();
    assert_eq!(format!("{v:.16e}"), field);
}

#[test]
fn zero_samples_is_a_configuration_error() {
    assert_eq!(monogamy(&["verify-theorem", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(monogamy(&["verify-corollary", "--rank", "9"]).status.code(), Some(2));
    assert_eq!(monogamy(&["sweep-family", "--grid", "1"]).status.code(), Some(2));
    assert_eq!(monogamy(&["oracle-check", "--rank", "5"]).status.code(), Some(2));
    assert_eq!(monogamy(&["verify-theorem", "--bogus"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = monogamy(&["sweep-family", "--grid", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_saturates_at_quarter_pi() {
    let o = monogamy(&["sweep-family", "--grid", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,phi_fam,C_AB,Ca_AB,C_ext,lhs_conc,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[100][0], std::f64::consts::FRAC_PI_2);
    for r in &rows {
        assert!((r[5] - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn sweep_below_saturation() {
    let o = monogamy(&["sweep-family", "--grid", "5", "--phi-fam", "1.0471975511965976", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row["lhs_conc"].as_f64().unwrap() <= 1.0);
    }
}

fn write_state(dir: &Path, amps: &[[f64; 2]; 8]) -> String {
    let path = dir.join("state.json");
    let text = serde_json::json!({ "dims": [2, 2, 2], "amplitudes": amps }).to_string();
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn canonical_reports_ghz_and_w() {
    let dir = tempfile::tempdir().unwrap();
    let h = 0.5f64.sqrt();
    let mut ghz = [[0.0; 2]; 8];
    ghz[0][0] = h;
    ghz[7][0] = h;
    let o = monogamy(&["canonical", "--input", &write_state(dir.path(), &ghz), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let l: Vec<f64> = v["summary"]["params"]["lambda"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((l[0] - h).abs() < 1e-12 && (l[4] - h).abs() < 1e-12);
    assert!(l[1].abs() + l[2].abs() + l[3].abs() < 1e-12);

    let t = (1.0f64 / 3.0).sqrt();
    let mut w = [[0.0; 2]; 8];
    for i in [1, 2, 4] {
        w[i][0] = t;
    }
    let o = monogamy(&["canonical", "--input", &write_state(dir.path(), &w)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let l: Vec<f64> = row[..5].iter().map(|x| x.parse().unwrap()).collect();
    for (got, want) in l.iter().zip([t, 0.0, t, t, 0.0]) {
        assert!((got - want).abs() < 1e-10, "{l:?}");
    }
    assert_eq!(row[7], "true");
}

#[test]
fn canonical_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(monogamy(&["canonical", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(monogamy(&["canonical", "--input", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn corollary_rank_one_is_exact() {
    let o = monogamy(&["verify-corollary", "--samples", "500", "--rank", "1", "--seed", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["summary"]["min_residual"].as_f64().unwrap() >= -1e-9);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["exact"] == true));
}

#[test]
fn corollary_mixed_reports_budget() {
    let o = monogamy(&["verify-corollary", "--samples", "3", "--rank", "2", "--restarts", "16", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["oracle"]["restarts"], 16);
    assert!(v["summary"]["bound_direction"].as_str().unwrap().contains("upper bound"));
}

#[test]
fn oracle_check_matches_closed_forms() {
    let o = monogamy(&["oracle-check", "--samples", "50", "--seed", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["summary"]["max_abs_min_minus_wootters"].as_f64().unwrap() <= 2e-3);
    for row in v["rows"].as_array().unwrap() {
        assert!(row["negativity"].as_f64().unwrap() <= row["oracle_min"].as_f64().unwrap() + 2e-3);
    }
}

#[test]
fn oracle_check_on_pure_states_collapses() {
    let o = monogamy(&["oracle-check", "--samples", "3", "--rank", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let w = row["wootters"].as_f64().unwrap();
        for key in ["oracle_min", "sum_mu", "oracle_max", "negativity"] {
            assert!((row[key].as_f64().unwrap() - w).abs() < 1e-9);
        }
    }
}
