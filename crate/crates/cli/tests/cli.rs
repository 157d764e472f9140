use std::process::{Command, Output};

use serde_json::Value;

fn pecurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pecurv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn list_names_suites_with_descriptions() {
    let o = pecurv(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["gbc", "cgb", "ambient-ricci", "rvol", "pfaffian-identities"] {
        let line = text.lines().find(|l| l.starts_with(&format!("{name} "))).unwrap_or_else(|| panic!("{name} missing"));
        assert!(line.contains('→') && line.len() > name.len() + 10, "{line}");
    }
}

#[test]
fn rvol_of_hyperbolic_four_space() {
    let o = pecurv(&["rvol", "--space", "hyperbolic", "--n", "4"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 4.0 * std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-12);
    assert!(stdout(&o).starts_with("13.1594"));
    assert_eq!(pecurv(&["rvol", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn gbc_on_product_of_spheres_passes() {
    let o = pecurv(&["verify", "gbc", "--manifold", "s2xs2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 2);
    for l in &lines {
        assert_eq!(l["pass"], true);
        assert!(l["abs_err"].as_f64().unwrap() <= 1e-8);
        assert!(!l["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn pfaffian_fuzz_passes_every_sample() {
    let o = pecurv(&["verify", "pfaffian-identities", "--dim", "6", "--samples", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&o);
    assert_eq!(lines.len(), 100);
    assert!(lines.iter().all(|l| l["pass"] == true));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pfaffian-identities: 100/100 pass"));
}

#[test]
fn invalid_requests_exit_with_two_before_computing() {
    for args in [
        &["verify", "nope"][..],
        &["verify", "gbc", "--manifold", "torus"],
        &["verify", "gbc", "--manifold", "perturbed-s4"],
        &["verify", "worked-examples", "--jet-order", "2"],
        &["verify", "cgb", "--tol", "-1"],
        &["verify"],
        &["eval", "weyl-norm", "--manifold", "s4", "--point", "1,2"],
        &["eval", "bogus", "--manifold", "s4"],
    ] {
        let o = pecurv(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failed_checks_exit_with_three() {
    let o = pecurv(&["verify", "gbc", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed checks: gbc"));
}

fn without_wall_time(o: &Output) -> Vec<Value> {
    json_lines(o)
        .into_iter()
        .map(|mut v| {
            v.as_object_mut().unwrap().remove("wall_time_ms");
            v
        })
        .collect()
}

#[test]
fn identical_seed_gives_identical_reports() {
    let args = ["verify", "ambient-ricci", "ambient-curvature", "pfaffian-identities", "--samples", "5", "--seed", "9"];
    let a = pecurv(&args);
    let b = pecurv(&args);
    assert!(a.status.success());
    assert_eq!(without_wall_time(&a), without_wall_time(&b));
    let c = pecurv(&["verify", "pfaffian-identities", "--samples", "5", "--seed", "10"]);
    let pf = |o: &Output| without_wall_time(o).into_iter().filter(|v| v["suite"] == "pfaffian-identities").collect::<Vec<_>>();
    assert_ne!(pf(&a), pf(&c));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("report.csv");
    std::fs::write(&cfg, r#"{"suites": ["kronecker"], "dim": 4, "format": "csv", "tol": 1e-300}"#).unwrap();
    let o = pecurv(&["verify", "--config", cfg.to_str().unwrap(), "--tol", "1e-12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("suite,id,anchor"));
    assert_eq!(csv.lines().count(), 1 + 6);
    assert!(stdout(&o).contains("kronecker: 6/6 pass"));

    std::fs::write(&cfg, r#"{"suites": ["kronecker"], "unknown_field": true}"#).unwrap();
    assert_eq!(pecurv(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn eval_prints_invariant_value() {
    let o = pecurv(&["eval", "weyl-norm", "--manifold", "cp2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 96.0).abs() < 1e-9);
    assert_eq!(v["weight"], -4);
}
