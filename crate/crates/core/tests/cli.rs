use std::process::{Command, Output};

use serde_json::Value;

fn cobosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cobosim"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn nonlocal_sweep_passes_with_schema_version() {
    let out = cobosim(&["bunch-nonlocal", "--d", "2..4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 3);
    for (r, d) in recs.iter().zip(2..) {
        assert_eq!(r["d"], d);
        let want = 1.0 - 1.0 / d as f64;
        assert!((r["success"].as_f64().unwrap() - want).abs() < 1e-9);
        assert!(r["amplitude_psi_f"]["re"].is_f64() && r["amplitude_psi_f"]["im"].is_f64());
    }
    assert_eq!(v["summary"]["passed"], true);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "bunch-nonlocal",
        "--d",
        "2..4",
        "--spectrum",
        "random:9:3",
        "--format",
        "csv",
    ];
    let a = cobosim(&args);
    let b = cobosim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let j1 = cobosim(&["ladder", "--d", "2..5", "--spectrum", "random:1:4"]);
    let j2 = cobosim(&["ladder", "--d", "2..5", "--spectrum", "random:1:4"]);
    assert_eq!(j1.stdout, j2.stdout);
}

#[test]
fn csv_header_and_complex_columns() {
    let out = cobosim(&["bunch-nonlocal", "--d", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,spectrum,purity,success,predicted,abs_delta,residual,completeness_defect,\
         amplitude_psi_f_re,amplitude_psi_f_im,amplitude_gamma_re,amplitude_gamma_im,pass"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 13);
    assert_eq!(row[0], "3");
    assert_eq!(row[12], "true");
}

#[test]
fn help_documents_columns_and_exit_codes() {
    let out = cobosim(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("bunch-nonlocal  d,spectrum,purity,success"));
    assert!(text.contains("Exit status"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    for args in [
        vec!["bunch-nonlocal", "--d", "7"],
        vec!["bunch-nonlocal", "--d", "x"],
        vec!["bunch-nonlocal"],
        vec!["ladder", "--d", "3", "--spectrum", "0.5,0.6,0.1"],
        vec!["ladder", "--d", "3", "--bogus"],
        vec!["teleport", "--d", "3"],
        vec!["bs-interacting", "--d", "2", "--times", "linspace:0:1"],
        vec!["ladder", "--d", "2", "--tolerance", "-1"],
    ] {
        let out = cobosim(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cap_override_allows_larger_d() {
    let out = cobosim(&[
        "bunch-nonlocal",
        "--d",
        "7",
        "--max-d",
        "7",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn failed_prediction_exits_1() {
    // a grid that never reaches the half-transfer time
    let out = cobosim(&[
        "bs-interacting",
        "--d",
        "2",
        "--gamma",
        "10",
        "--times",
        "0.1,0.2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["summary"]["failed"], 1);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL") && !stderr.contains('\x1b'));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let report = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"scenario": "bunch-nonlocal", "d": "2..3", "spectrum": "uniform",
                "format": "csv", "tolerance": 1e-9, "output": {:?}}}"#,
            report.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = cobosim(&["--config", cfg.to_str().unwrap(), "--d", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("4,uniform,"));

    std::fs::write(&cfg, r#"{"scenario": "ladder", "dee": 3}"#).unwrap();
    let out = cobosim(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_scenario_passes_on_small_inputs() {
    for args in [
        vec!["ladder", "--d", "1..6", "--spectrum", "random:2:2"],
        vec!["rdm", "--d", "1..4"],
        vec!["bs-independent", "--d", "2..4", "--spectrum", "random:4:2"],
        vec!["bs-interacting", "--d", "2", "--gamma", "10"],
        vec!["bunch-ideal", "--d", "2..4", "--spectrum", "random:6:2"],
        vec!["bunch-nonlocal", "--spectrum", "0.6,0.3,0.1"],
        vec!["verify", "--d", "2..3"],
    ] {
        let out = cobosim(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["summary"]["passed"], true);
    }
}
