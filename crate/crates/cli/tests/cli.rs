use std::fs;
use std::path::Path;
use std::process::Command;

use husimi_cli::{run_scenario_file, Scenario};

fn husimi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_husimi"))
}

fn scenario_path(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn bundled_scenarios_parse() {
    for name in ["constant.json", "step2.json", "qcheck.json"] {
        let bytes = fs::read(scenario_path(name)).unwrap();
        Scenario::from_json(&bytes).unwrap();
    }
}

#[test]
fn unknown_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"profile":{"kind":"free"},"t_end":1,"dt_out":0.1,"solver_tol":1e-10,"outputs":["trajectory_csv"],"colour":1}"#).unwrap();
    let out = husimi().arg("run").arg(&path).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert!(!dir.path().join("o").exists(), "nothing may be written before validation");
}

#[test]
fn bad_profile_parameter_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"profile":{"kind":"constant","omega0":2.0},"t_end":1,"dt_out":0.1,"solver_tol":1e-10,"outputs":["trajectory_csv"]}"#).unwrap();
    let out = husimi().arg("run").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    // a grid far too narrow for the coherent state
    let path = dir.path().join("narrow.json");
    fs::write(
        &path,
        r#"{"profile":{"kind":"free"},"t_end":1,"dt_out":0.5,"solver_tol":1e-10,
            "states":[{"kind":"coherent","alpha":[1.0,0.0]}],
            "grid":{"x_min":-1.0,"x_max":1.0,"n_points":101},"outputs":["wavefunction_csv"]}"#,
    )
    .unwrap();
    let out = husimi().arg("run").arg(&path).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("states[0]"));
}

#[test]
fn missing_scenario_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = husimi().arg("run").arg(dir.path().join("none.json")).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn every_artifact_has_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario_file(Path::new(&scenario_path("constant.json")), dir.path()).unwrap();
    for a in &summary.artifacts {
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join(format!("{a}.meta.json"))).unwrap()).unwrap();
        for key in ["tool_version", "scenario_sha256", "tolerances", "timings_ms"] {
            assert!(meta.get(key).is_some(), "{a}: {key}");
        }
        let text = fs::read_to_string(dir.path().join(a)).unwrap();
        if a.ends_with(".csv") {
            assert!(text.lines().next().unwrap().chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == ','));
        }
    }
}

#[test]
fn subcommands_write_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"R_her":[[2.0]],"r_her":[[2.0]],"Lambda":[[1.0]],"M_quad":[[1.0]],"c":[0.0],"d":[0.0]}"#).unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["evolve", "--profile", "step", "--omega1", "2", "--t-end", "2", "--dt-out", "0.1"], "trajectory.csv"),
        (vec!["squeeze", "--profile", "modulated", "--kappa", "0.5", "--nu", "2", "--t-end", "2"], "squeezing.csv"),
        (vec!["states", "--profile", "free", "--state", "number", "--n", "3", "--sample-time", "1"], "states.json"),
        (vec!["qdeform", "--lambda", "0.1"], "qreport.json"),
        (vec!["overlap", "--spec", spec.to_str().unwrap(), "--n", "1", "--m", "1"], "overlap.json"),
        (vec!["fc", "--profile", "free", "--time", "1", "--n-max", "2"], "franck_condon.json"),
    ];
    for (i, (args, artifact)) in cases.into_iter().enumerate() {
        let out_dir = dir.path().join(format!("c{i}"));
        let out = husimi().args(&args).arg("--out").arg(&out_dir).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join(artifact).exists());
        assert!(out_dir.join(format!("{artifact}.meta.json")).exists());
    }
    let overlap: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("c4/overlap.json")).unwrap()).unwrap();
    assert!(overlap["rel_err"].as_f64().unwrap() < 1e-6);
    assert!((overlap["value"].as_f64().unwrap() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
}

#[test]
fn bad_flags_exit_with_two() {
    let out = husimi().args(["evolve", "--profile", "step", "--t-end", "1", "--out", "/tmp/unused"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = husimi().args(["evolve", "--profile", "warp", "--t-end", "1", "--out", "/tmp/unused"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
