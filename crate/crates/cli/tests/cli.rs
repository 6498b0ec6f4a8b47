use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchflow")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_duck() {
    let duck = data("duck.json");
    let v = json(&run(&["bound", "--input", path(&duck)]));
    let max = v["bound"]["uniform_maximum"].as_f64().unwrap();
    assert!((max - 18.1294).abs() < 1e-3);
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn bound_param_override() {
    let v = json(&run(&["bound", "--input", path(&data("duck.json")), "--param", "a=6"]));
    let rate = v["growth"]["growth_rate"].as_f64().unwrap();
    assert!((rate - (1.0 + 6.0 * 2f64.ln() / (4.0 * PI))).abs() < 1e-12);
    assert!((rate - 1.3310).abs() < 1e-4);
    let v = json(&run(&["bound", "--input", path(&data("duck.json")), "--param", "a=2"]));
    assert_eq!(v["parameters"]["a"], 2.0);
}

#[test]
fn invalid_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec: Value = serde_json::from_str(&std::fs::read_to_string(data("duck.json")).unwrap()).unwrap();
    spec["sheets"][0]["cycle_degree"] = 3.0.into();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, spec.to_string()).unwrap();
    let out = run(&["bound", "--input", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("switch"));

    std::fs::write(&file, "{ not json").unwrap();
    assert_eq!(run(&["simulate", "--input", path(&file)]).status.code(), Some(2));
}

#[test]
fn missing_input_exits_one() {
    let out = run(&["bound", "--input", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_one() {
    let out = run(&["bound", "--input", path(&data("duck.json")), "--output", "/definitely/not/here/out.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn family_reports() {
    let v = json(&run(&["family", "--n", "3"]));
    let check = &v["cross_check"];
    assert!((check["formula_bound"].as_f64().unwrap() - 18.1294).abs() < 1e-3);
    assert!((check["closed_form_bound"].as_f64().unwrap() - 18.1294).abs() < 1e-3);
    assert!(check["discrepancy"].as_f64().unwrap().abs() < 1e-12);

    let v = json(&run(&["family", "--n", "4"]));
    let check = &v["cross_check"];
    assert!((check["closed_form_bound"].as_f64().unwrap() - 7.6256).abs() < 1e-3);
    assert!((check["formula_bound"].as_f64().unwrap() - 4.0 * PI / 3f64.ln()).abs() < 1e-9);
    assert!(!check["note"].as_str().unwrap().is_empty());
    assert_eq!(v["spec"]["sheets"].as_array().unwrap().len(), 4);

    assert_eq!(run(&["family", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn simulate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let duck = data("duck.json");
    let mut outputs = Vec::new();
    for (k, extra) in [&[][..], &[][..], &["--sequential"][..]].iter().enumerate() {
        let report = dir.path().join(format!("r{k}.json"));
        let events = dir.path().join(format!("e{k}.jsonl"));
        let mut args = vec![
            "simulate", "--input", path(&duck), "--seed", "0", "--trajectories", "100",
            "--radius", "3", "--output", path(&report), "--events", path(&events),
        ];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert!(out.status.success());
        outputs.push((std::fs::read(&report).unwrap(), std::fs::read(&events).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(outputs[0].0.ends_with(b"\n"));
}

#[test]
fn simulate_duck_matches_flux() {
    let out = run(&["simulate", "--input", path(&data("duck.json")), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let oracle = 6.0 / (12.0 * PI * PI);
    let rows: Vec<_> = text.lines().filter(|l| l.starts_with("rate,")).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let rate: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!((rate - oracle).abs() / oracle < 0.05, "{row}");
    }
    assert!(text.lines().any(|l| l.starts_with("meta,input_sha256")));
}

#[test]
fn csv_has_twelve_significant_digits() {
    let out = run(&["simulate", "--input", path(&data("duck.json")), "--format", "csv", "--trajectories", "20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1).filter(|l| !l.starts_with("meta")) {
        for cell in line.split(',') {
            if cell.parse::<f64>().is_ok() {
                let digits: String = cell
                    .trim_start_matches('-')
                    .chars()
                    .filter(|c| c.is_ascii_digit())
                    .collect();
                assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
            }
        }
    }
}

#[test]
fn simulate_no_branch_has_zero_rates() {
    let v = json(&run(&["simulate", "--input", path(&data("torus_no_branch.json")), "--trajectories", "20"]));
    let est = &v["estimates"];
    assert_eq!(est["crossings"], 0);
    assert_eq!(est["entropy_rate"], 0.0);
    assert!(est["crossing_rates"].as_array().unwrap().iter().all(|r| r["rate"] == 0.0));
}

#[test]
fn trace_logs() {
    let out = run(&["trace", "--input", path(&data("torus_no_branch.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let duck = data("duck.json");
    let args = ["trace", "--input", path(&duck), "--budget", "100", "--param", "a=6", "--seed", "4"];
    let first = run(&args);
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    assert!(text.lines().count() > 0);
    for line in text.lines() {
        let e: Value = serde_json::from_str(line).unwrap();
        assert_eq!(e["p"], 0.5);
        for key in ["trajectory", "arclength", "curve", "from", "to"] {
            assert!(!e[key].is_null(), "{key}");
        }
    }
    assert_eq!(first.stdout, run(&args).stdout);
}

#[test]
fn unsupported_sheet_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g2.json");
    std::fs::write(
        &file,
        r#"{"sheets":[{"id":"S","genus":2,"boundary_ends":[],"boundary_lengths":[],"cycle_degree":1.0}],"branch_curves":[]}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--input", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    // Bounds need no realization.
    assert!(run(&["bound", "--input", path(&file)]).status.success());
}

#[test]
fn input_is_not_modified() {
    let duck = data("duck.json");
    let before = std::fs::read(&duck).unwrap();
    run(&["simulate", "--input", path(&duck), "--trajectories", "5"]);
    run(&["bound", "--input", path(&duck), "--param", "a=3"]);
    assert_eq!(before, std::fs::read(&duck).unwrap());
}
