use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Value,
    stderr: String,
}

fn exec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrikos")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> Run {
    let out = exec(args);
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        report: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn squared_space(dir: &TempDir) -> String {
    write(dir.path(), "sq.json", &json!({"points": [0, 1, 2], "formula": "(x-y)^2"}))
        .display()
        .to_string()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .chain(report["heuristic_checks"].as_array().unwrap())
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn validate_b_on_squared_points() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let r = run(&["validate", "--structure", "b", "--space", &sp, "--K", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["schema"], "metrikos-report/1");
    assert_eq!(r.report["constants"]["K_min"], 2.0);
    assert_eq!(r.report["pass"], true);
    assert!(check(&r.report, "b_triangle")["timing_ms"].is_number());
    let r = run(&["validate", "--structure", "b", "--space", &sp, "--K", "1.5"]);
    assert_eq!(r.code, 1);
    let w = &check(&r.report, "b_triangle")["verdict"]["witness"];
    assert_eq!(w["points"], json!(["0", "1", "2"]));
}

#[test]
fn validate_f_ln_without_offset_fails_on_outer_pair() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let r = run(&["validate", "--structure", "f", "--space", &sp, "--f", "ln(t)", "--alpha", "0"]);
    assert_eq!(r.code, 1);
    let w = &check(&r.report, "f_chain")["verdict"]["witness"];
    assert_eq!(w["points"], json!(["0", "2"]));
    assert_eq!(w["chain"], json!(["0", "1", "2"]));
    let r = run(&["validate", "--structure", "f", "--space", &sp, "--f", "ln(t)", "--alpha", "ln(2)"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn validate_theta_presets() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "line.json", &json!({"points": [0, 1, 3], "formula": "abs(x-y)"}));
    let sp = sp.to_str().unwrap();
    let r = run(&["validate", "--structure", "theta", "--space", sp, "--theta", "s+t+s*t"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run(&["validate", "--structure", "theta", "--space", sp, "--theta", "max(s,t)"]);
    assert_eq!(r.code, 1);
    let w = &check(&r.report, "b_action")["verdict"]["witness"];
    assert_eq!(w["args"], json!([1.0, 0.0, 1.0, 0.5]));
}

#[test]
fn theta_chain_bounds_from_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "job.json",
        &json!({
            "structure": "theta",
            "space": {"labels": ["a", "b", "c", "d"], "matrix": [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]},
            "params": {"theta": "s+t"},
            "chains": [["a", "b", "c", "d"], ["a", "c", "d"]],
        }),
    );
    let r = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(check(&r.report, "chain_bound[0]")["verdict"]["certificates"]["fold"], 3.0);
}

#[test]
fn heuristics_only_decide_under_strict() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "line.json", &json!({"points": [0, 1, 3], "formula": "abs(x-y)"}));
    let sp = sp.to_str().unwrap();
    // f(t) = t is monotone and satisfies the chain condition but never tends to -inf
    let r = run(&["validate", "--structure", "f", "--space", sp, "--f", "t"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(check(&r.report, "f2_limit")["pass"], false);
    let r = run(&["validate", "--structure", "f", "--space", sp, "--f", "t", "--strict"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report["strict"], true);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"matrix\": [[0, 1], [1, 0]").unwrap();
    let bad = bad.to_str().unwrap();

    let r = run(&["validate", "--structure", "b", "--space", bad]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.json") && r.stderr.contains("malformed JSON"), "{}", r.stderr);

    let r = run(&["validate", "--structure", "b", "--space", "/nonexistent/space.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("/nonexistent/space.json"), "{}", r.stderr);

    let r = run(&["validate", "--structure", "f", "--space", &sp, "--f", "ln(t"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("offset 4"), "{}", r.stderr);

    let r = run(&["validate", "--structure", "q", "--space", &sp]);
    assert_eq!(r.code, 2);
    let r = run(&["validate", "--structure", "f", "--space", &sp]);
    assert_eq!(r.code, 2);
    let r = run(&["validate", "--structure", "b", "--space", &sp, "--theta", "s+t"]);
    assert_eq!(r.code, 2);
    let r = run(&["validate", "--structure", "b", "--space", &sp, "--K", "-1"]);
    assert_eq!(r.code, 2);
    let r = run(&["validate", "--structure", "b"]);
    assert_eq!(r.code, 2);
    let r = run(&["validate", "--bogus-flag"]);
    assert_eq!(r.code, 2);

    let cfg = write(dir.path(), "extra.json", &json!({"structure": "b", "spaces": {}}));
    let r = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("spaces"), "{}", r.stderr);
}

#[test]
fn broken_axioms_are_a_check_failure() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "asym.json", &json!({"matrix": [[0, 1], [2, 0]]}));
    let r = run(&["validate", "--structure", "b", "--space", sp.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert_eq!(check(&r.report, "distance_axioms")["verdict"]["witness"]["kind"], "symmetry");
    let r = run(&["regularity", "--structure", "b", "--space", sp.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.report.get("certificates").is_none());
}

fn certs<'a>(report: &'a Value, source: &str) -> Vec<&'a Value> {
    report["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["source"] == source)
        .collect()
}

#[test]
fn regularity_b_radius() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let r = run(&["regularity", "--structure", "b", "--space", &sp, "--K", "2", "--k", "4", "--anchor", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = certs(&r.report, "r = t/K");
    assert_eq!(c.len(), 1);
    assert_eq!(c[0]["value"], 2.0);
    assert_eq!(c[0]["condition"], "iii-C");
    assert_eq!(c[0]["replay"]["pass"], true);
    assert_eq!(c[0]["replay"]["anchors"], 1);
    assert_eq!(check(&r.report, "cross_check")["pass"], true);
}

#[test]
fn regularity_f_phi_is_a_sixth_of_eps() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let r = run(&["regularity", "--structure", "f", "--space", &sp, "--f", "ln(t)", "--alpha", "ln(3)", "--eps", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = certs(&r.report, "phi = delta/2");
    let phi = c[0]["value"].as_f64().unwrap();
    assert!((phi - 1.0 / 6.0).abs() <= 1e-6 / 6.0, "{phi}");
    assert!(c[0]["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(c[0]["method"], "paper-formula");
}

#[test]
fn regularity_theta_sum() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "line.json", &json!({"points": [0, 0.25, 1, 2], "formula": "abs(x-y)"}));
    let r = run(&["regularity", "--structure", "theta", "--space", sp.to_str().unwrap(), "--theta", "s+t", "--k", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = certs(&r.report, "delta/sqrt(2)");
    assert!((c[0]["extras"]["delta"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((c[0]["value"].as_f64().unwrap() - 0.5 / 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn regularity_missing_certificate_has_search_trace() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "line.json", &json!({"points": [0, 1, 3], "formula": "abs(x-y)"}));
    let r = run(&["regularity", "--structure", "f", "--space", sp.to_str().unwrap(), "--f", "t", "--alpha", "2", "--eps", "1", "--k", "1"]);
    assert_eq!(r.code, 1);
    let f = &r.report["failures"][0];
    assert!(f["reason"].as_str().unwrap().contains("not found at this resolution"), "{f}");
    assert_eq!(f["search"]["grid_points"], 31);
}

#[test]
fn metrize_b_recovers_the_line() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let out = dir.path().join("report.json");
    let o = exec(&["metrize", "--structure", "b", "--space", &sp, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("max_distortion: 1"), "{stdout}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let m = &report["metric"];
    assert_eq!(m["transform"], "power:0.5");
    assert_eq!(m["distortion"]["within_four"], true);
    for (i, row) in m["metric"].as_array().unwrap().iter().enumerate() {
        for (j, v) in row.as_array().unwrap().iter().enumerate() {
            assert!((v.as_f64().unwrap() - (i as f64 - j as f64).abs()).abs() < 1e-12);
        }
    }
}

#[test]
fn metrize_metric_input_is_fixed() {
    let dir = TempDir::new().unwrap();
    let sp = write(dir.path(), "m.json", &json!({"matrix": [[0, 3, 4], [3, 0, 5], [4, 5, 0]]}));
    let sp = sp.to_str().unwrap();
    for args in [
        vec!["--structure", "b"],
        vec!["--structure", "f", "--f", "ln(t)", "--alpha", "0"],
        vec!["--structure", "theta", "--theta", "s+t"],
    ] {
        let mut all = vec!["metrize", "--space", sp, "--transform", "identity"];
        all.extend(args);
        let r = run(&all);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.report["metric"]["metric"], json!([[0.0, 3.0, 4.0], [3.0, 0.0, 5.0], [4.0, 5.0, 0.0]]));
        assert_eq!(r.report["metric"]["max_distortion"], 1.0);
    }
}

#[test]
fn metrize_f_sandwich() {
    let dir = TempDir::new().unwrap();
    let sp = squared_space(&dir);
    let r = run(&["metrize", "--structure", "f", "--space", &sp, "--f", "ln(t)", "--alpha", "ln(3)"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for row in r.report["sandwich"].as_array().unwrap() {
        let (d, big, up) = (row["lower"].as_f64().unwrap(), row["distance"].as_f64().unwrap(), row["upper"].as_f64().unwrap());
        assert!(d <= big && big <= up);
        assert!((up - 3.0 * d).abs() < 1e-9 * up);
    }
    let r = run(&["metrize", "--structure", "f", "--space", &sp, "--f", "ln(t)", "--alpha", "ln(3)", "--transform", "cube"]);
    assert_eq!(r.code, 2);
}

fn fuzz_config(dir: &TempDir, v: Value) -> String {
    write(dir.path(), "fuzz.json", &v).display().to_string()
}

#[test]
fn fuzz_metric_families_have_no_violations() {
    let dir = TempDir::new().unwrap();
    let cfg = fuzz_config(&dir, json!({"structure": "b", "fuzz": {"generator": "euclidean"}}));
    let r = run(&["fuzz", "--config", &cfg, "--K", "1", "--seed", "3", "--trials", "100"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["fuzz"]["violations"], 0);
    let cfg = fuzz_config(&dir, json!({"structure": "b", "fuzz": {"generator": "euclidean_squared"}}));
    let r = run(&["fuzz", "--config", &cfg, "--K", "2", "--seed", "3", "--trials", "100"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["fuzz"]["violations"], 0);
    let cfg = fuzz_config(&dir, json!({"structure": "b", "fuzz": {"generator": "random_matrix", "range": [1, 2]}}));
    let r = run(&["fuzz", "--config", &cfg, "--K", "1", "--seed", "3", "--trials", "50"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn fuzz_shrinks_ln_violations_to_three_points() {
    let dir = TempDir::new().unwrap();
    let cfg = fuzz_config(
        &dir,
        json!({"structure": "f", "params": {"f": "ln(t)", "alpha": 0}, "seed": 9, "trials": 100,
               "fuzz": {"generator": "euclidean_squared", "expect_failure": true}}),
    );
    let r = run(&["fuzz", "--config", &cfg]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let findings = r.report["fuzz"]["findings"].as_array().unwrap();
    assert!(!findings.is_empty());
    for f in findings {
        assert_eq!(f["shrunk_points"], 3);
        assert_eq!(f["witness"]["kind"], "f_chain");
        assert_eq!(f["labels"].as_array().unwrap().len(), 3);
    }
    let again = run(&["fuzz", "--config", &cfg]);
    assert_eq!(again.report["fuzz"], r.report["fuzz"]);
    // without the declaration the same violations are unexpected
    let r = run(&["fuzz", "--structure", "f", "--f", "ln(t)", "--alpha", "0", "--seed", "9", "--trials", "10"]);
    assert_eq!(r.code, 1);
}

#[test]
fn fuzz_formula_generator_and_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = fuzz_config(&dir, json!({"structure": "theta", "params": {"theta": "s+t"}, "fuzz": {"generator": "formula", "formula": "abs(x-y)^0.5", "points": 5}}));
    let r = run(&["fuzz", "--config", &cfg, "--seed", "1", "--trials", "30"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run(&["fuzz", "--config", &cfg, "--trials", "30"]);
    assert_eq!(r.code, 2, "missing seed");
    assert!(r.stderr.contains("seed"));
    let r = run(&["fuzz", "--config", &cfg, "--seed", "1", "--trials", "0"]);
    assert_eq!(r.code, 2);
    let cfg = fuzz_config(&dir, json!({"structure": "b", "params": {"K": 1}, "fuzz": {"generator": "formula"}}));
    let r = run(&["fuzz", "--config", &cfg, "--seed", "1"]);
    assert_eq!(r.code, 2);
}
