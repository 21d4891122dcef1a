use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointisland"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--i", "2", "--alpha-tilde", "1", "--beta", "1", "--t-end", "1e3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trajectory.csv", "observables.csv", "profile.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let s = json(&dir.path().join("summary.json"));
    assert!(s["summary"]["max_mass_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(s["summary"]["truncation_adequate"], true);
    assert_eq!(s["params"]["alpha"], "1");
    let obs = fs::read_to_string(dir.path().join("observables.csv")).unwrap();
    assert_eq!(obs.lines().next().unwrap(), "T,mass,number,z,v,w,tail_rate");
}

#[test]
fn simulate_rejects_small_critical_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--i", "1", "--alpha-tilde", "1", "--beta", "1", "--t-end", "10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("i must be ≥ 2"), "{}", stderr(&o));
}

#[test]
fn zero_horizon_echoes_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["simulate", "--i", "3", "--t-end", "0", "--initial", "0.5,0.25", "--n-max", "6", "--format", "json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let t = json(&dir.path().join("trajectory.json"));
    assert_eq!(t["T"], serde_json::json!([0.0]));
    assert_eq!(t["states"][0], serde_json::json!([0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
}

#[test]
fn physical_parameters_are_scaled() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--i", "5", "--alpha-tilde", "2", "--beta", "3", "--t-end", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("summary.json"))["params"]["alpha"], "2/9");
}

#[test]
fn expand_reproduces_i5_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["expand", "--i", "5", "--alpha", "1", "--beta", "1", "--order", "15"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let e = json(&dir.path().join("expansion.json"));
    let ode: Vec<&str> = e["reduced_ode"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(&ode[8..], &["-1", "1", "0", "0", "0", "-1", "31", "-80"]);
    assert!(ode[..8].iter().all(|c| *c == "0"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("c1' ~ -c1^8 + c1^9"), "{stdout}");
}

#[test]
fn expand_i3_gw() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["expand", "--i", "3", "--alpha", "1", "--beta", "1", "--order", "10"], dir.path());
    assert!(o.status.success());
    let e = json(&dir.path().join("expansion.json"));
    let gw: Vec<&str> = e["series"]["gw"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(&gw[..10], &["0", "0", "2", "0", "0", "0", "-1", "1", "0", "-1"]);
}

#[test]
fn expand_rejects_tiny_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["expand", "--i", "3", "--order", "1"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("order"));
}

#[test]
fn compare_finds_divergence_at_14() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compare", "--i", "5", "--alpha", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("power 14"));
    let c = json(&dir.path().join("comparison.json"));
    assert_eq!(c["report"]["first_difference"], 14);
    assert_eq!(c["report"]["leading_terms_agree"], true);
}

#[test]
fn outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert!(run(&["expand", "--i", "4", "--alpha", "3/2", "--beta", "2/5"], dir.path()).status.success());
        assert!(run(&["simulate", "--i", "2", "--t-end", "50"], dir.path()).status.success());
    }
    for f in ["expansion.json", "summary.json", "trajectory.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested");
    let o = Command::new(env!("CARGO_BIN_EXE_pointisland"))
        .args(["expand", "--i", "2"])
        .env("POINTISLAND_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("expansion.json").exists());
    assert!(target.join("ode.txt").exists());
}

#[test]
fn verify_names_failures_from_tiny_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--i", "2", "--preset", "quick", "--n-max", "6"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("failing criteria"), "{err}");
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["pass"], false);
    let failing: Vec<u64> = report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert!(failing.contains(&6) && failing.contains(&7), "{failing:?}");
    for c in report["criteria"].as_array().unwrap() {
        if [2, 3, 4, 5].contains(&c["id"].as_u64().unwrap()) {
            assert_eq!(c["pass"], true, "{c}");
        }
    }
}
