use chernres_cli::run::{run, Options};
use chernres_cli::scenario::{parse_scenario, parse_scenario_str, ScenarioError};
use chernres_cli::verify::verify;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{}.toml", name))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("chernres-cli-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

const MINIMAL: &str = r#"
version = 1
name = "minimal"
mode = "sheaf"
phi = ["e1"]

[manifold]
n = 1

[complex]
maps = [[["z1"]]]

[[test_forms]]
name = "bump"
radius = 0.5
"#;

fn invalid(src: &str) -> Vec<String> {
    match parse_scenario_str(src) {
        Err(ScenarioError::Invalid(e)) => e,
        Err(e) => vec![e.to_string()],
        Ok(_) => Vec::new(),
    }
}

#[test]
fn every_fixture_parses() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            parse_scenario(&p).unwrap_or_else(|e| panic!("{}: {}", p.display(), e));
            count += 1;
        }
    }
    assert!(count >= 4);
}

#[test]
fn scenarios_round_trip_through_toml() {
    for name in ["point-sheaf-1d", "koszul-2d", "linear-foliation-2d", "point-sheaf-1d-two-charts"] {
        let s = parse_scenario(&fixture(name)).unwrap();
        let again = parse_scenario_str(&s.to_toml()).unwrap();
        assert_eq!(s, again, "{}", name);
    }
    parse_scenario_str(MINIMAL).unwrap();
}

#[test]
fn unknown_fields_are_rejected() {
    let src = MINIMAL.replace("n = 1", "n = 1\ndimension = 1");
    let err = parse_scenario_str(&src).unwrap_err();
    assert!(matches!(err, ScenarioError::Syntax(_)), "{}", err);
    assert!(err.to_string().contains("dimension"));
}

#[test]
fn validation_reports_every_problem() {
    let src = MINIMAL.replace("version = 1", "version = 7").replace(r#"phi = ["e1"]"#, r#"phi = ["e3"]"#);
    let errs = invalid(&src);
    assert!(errs.len() >= 2, "{:?}", errs);
    assert!(errs.iter().any(|e| e.contains("version")));
    assert!(errs.iter().any(|e| e.contains("e3")));
}

#[test]
fn conjugates_are_rejected_in_vector_fields() {
    let src = std::fs::read_to_string(fixture("linear-foliation-2d")).unwrap().replace(r#""2*z2""#, r#""2*zb1""#);
    let errs = invalid(&src);
    assert!(errs.iter().any(|e| e.contains("vector_field")), "{:?}", errs);
}

#[test]
fn foliation_chern_metric_needs_torsion_free() {
    let base = std::fs::read_to_string(fixture("linear-foliation-2d")).unwrap();
    let with_metric = base.replace(
        r#"vector_field = ["z1", "2*z2"]"#,
        r#"vector_field = ["z1", "2*z2"]
connection = "chern"
metrics = [{ level = 0, matrix = [["1 + z1*zb1", "0"], ["0", "1"]] }]"#,
    );
    let errs = invalid(&with_metric);
    assert!(errs.iter().any(|e| e.contains("torsion_free")), "{:?}", errs);
    let asserted = with_metric.replace(r#"connection = "chern""#, "connection = \"chern\"\ntorsion_free = true");
    assert!(invalid(&asserted).is_empty());
}

#[test]
fn test_form_degrees_must_match() {
    let src = MINIMAL.replace("radius = 0.5", "radius = 0.5\narea = [1]");
    let errs = invalid(&src);
    assert!(errs.iter().any(|e| e.contains("needs a test form of degree 0")), "{:?}", errs);
}

#[test]
fn run_reports_the_point_mass() {
    let s = parse_scenario(&fixture("point-sheaf-1d")).unwrap();
    let r = run(&s, &Options::default()).unwrap();
    assert!(r.passed, "{}", r.to_json());
    let e = r.estimate("e1", "bump").unwrap();
    assert!((e.estimate.limit.re - 1.0).abs() < 0.02);
    assert_eq!(r.cycle.len(), 1);
    let dir = scratch("run");
    let json = r.write(&dir).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["command"], "run");
    let csv = std::fs::read_to_string(dir.join("ladder-phi0-bump.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,re,im,quadrature_error"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn overrides_apply() {
    let s = parse_scenario(&fixture("point-sheaf-1d")).unwrap();
    let opts = Options { ladder: Some(vec![0.1, 0.03, 0.01, 0.003]), tolerance_scale: 2.0, ..Options::default() };
    let r = run(&s, &opts).unwrap();
    assert_eq!(r.config.ladder.len(), 4);
    let c = r.checks.iter().find(|c| c.suite == "expected").unwrap();
    assert!((c.tolerance - 0.04).abs() < 1e-15);
    let bad = Options { ladder: Some(vec![0.1, 0.2, 0.01, 0.003]), ..Options::default() };
    assert!(run(&s, &bad).is_err());
}

#[test]
fn cheap_verify_suites_pass() {
    let s = parse_scenario(&fixture("point-sheaf-1d")).unwrap();
    let r = verify(&s, "all", &Options::default()).unwrap();
    assert!(r.passed, "{}", r.to_json());
    let suites: std::collections::BTreeSet<&str> = r.checks.iter().map(|c| c.suite.as_str()).collect();
    assert_eq!(suites.len(), 5);
    assert!(verify(&s, "nonsense", &Options::default()).is_err());
}

fn without_volatile(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let o = v.as_object_mut().unwrap();
    o.remove("runtime_seconds");
    o["config"].as_object_mut().unwrap().remove("threads");
    v
}

#[test]
fn binary_is_deterministic_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_chernres");
    let mut outs = Vec::new();
    for threads in ["1", "2"] {
        let dir = scratch(&format!("det{}", threads));
        let st = Command::new(bin)
            .args(["run", fixture("point-sheaf-1d").to_str().unwrap(), "--seed", "5", "--out", dir.to_str().unwrap()])
            .env("CHERNRES_THREADS", threads)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        outs.push((without_volatile(&dir.join("run.json")), std::fs::read_to_string(dir.join("ladder-phi0-bump.csv")).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_chernres");
    let dir = scratch("exit");
    let ok = Command::new(bin)
        .args(["verify", "--suite", "algebra", fixture("point-sheaf-1d").to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(dir.join("verify.json").exists());
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, MINIMAL.replace("mode = \"sheaf\"", "mode = \"sheef\"")).unwrap();
    let err = Command::new(bin).args(["run", bad.to_str().unwrap(), "--out", dir.to_str().unwrap()]).output().unwrap();
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("sheef"));
    // a check that cannot pass at this tolerance exits with 1
    let strict = Command::new(bin)
        .args(["run", fixture("point-sheaf-1d").to_str().unwrap(), "--tolerance-scale", "1e-9", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
    let oracle = Command::new(bin).args(["oracle", fixture("linear-foliation-2d").to_str().unwrap(), "--out", dir.to_str().unwrap()]).output().unwrap();
    assert_eq!(oracle.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("oracle.json")).unwrap()).unwrap();
    assert!((v["oracle"][0]["value"][0].as_f64().unwrap() - 4.5).abs() < 1e-6);
}
