//! Report assembly and digests.

use std::time::Instant;

use metrikos::Verdict;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{EXIT_FAIL, EXIT_PASS};

pub const SCHEMA: &str = "metrikos-report/1";
pub const TIMING_KEY: &str = "timing_ms";

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub heuristic: bool,
    pub pass: bool,
    pub verdict: Verdict<f64>,
    pub timing_ms: f64,
}

#[derive(Debug)]
pub struct Report {
    command: String,
    structure: Value,
    input_digest: String,
    checks: Vec<CheckEntry>,
    heuristic_checks: Vec<CheckEntry>,
    sections: Map<String, Value>,
    /// Failures that are not check verdicts (replays, missing certificates).
    failures: Vec<Value>,
}

impl Report {
    pub fn new(command: &str, structure: impl Serialize, canonical_input: &Value) -> Self {
        Report {
            command: command.to_string(),
            structure: serde_json::to_value(structure).unwrap_or(Value::Null),
            input_digest: digest(canonical_input),
            checks: Vec::new(),
            heuristic_checks: Vec::new(),
            sections: Map::new(),
            failures: Vec::new(),
        }
    }

    /// Runs `f`, timing it, and files the verdict as a regular or heuristic check.
    pub fn check<E>(
        &mut self,
        name: &str,
        heuristic: bool,
        f: impl FnOnce() -> Result<Verdict<f64>, E>,
    ) -> Result<bool, E> {
        let start = Instant::now();
        let verdict = f()?;
        let entry = CheckEntry {
            name: name.to_string(),
            heuristic,
            pass: verdict.pass,
            verdict,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        let pass = entry.pass;
        if heuristic {
            self.heuristic_checks.push(entry);
        } else {
            self.checks.push(entry);
        }
        Ok(pass)
    }

    pub fn checks(&self) -> &[CheckEntry] {
        &self.checks
    }

    pub fn heuristic_checks(&self) -> &[CheckEntry] {
        &self.heuristic_checks
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn fail(&mut self, failure: Value) {
        self.failures.push(failure);
    }

    pub fn section(&mut self, name: &str, value: impl Serialize) {
        self.sections
            .insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn push_to(&mut self, name: &str, value: impl Serialize) {
        let entry = self
            .sections
            .entry(name.to_string())
            .or_insert_with(|| Value::Array(Vec::new()));
        if let Value::Array(items) = entry {
            items.push(serde_json::to_value(value).unwrap_or(Value::Null));
        }
    }

    /// Overall pass: every regular check passed, no recorded failures, and
    /// with `strict` every heuristic check passed too.
    pub fn passed(&self, strict: bool) -> bool {
        self.all_checks_pass() && self.failures.is_empty() && (!strict || self.heuristic_checks.iter().all(|c| c.pass))
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.passed(strict) {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self, strict: bool) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "tool": {"name": "metrikos", "version": env!("CARGO_PKG_VERSION")},
            "command": self.command,
            "structure": self.structure,
            "input_digest": self.input_digest,
            "checks": self.checks,
            "heuristic_checks": self.heuristic_checks,
            "failures": self.failures,
            "strict": strict,
            "pass": self.passed(strict),
            "exit_code": self.exit_code(strict),
        });
        let obj = v.as_object_mut().expect("object");
        for (k, s) in &self.sections {
            obj.insert(k.clone(), s.clone());
        }
        let d = digest(&strip_timing(&v));
        v.as_object_mut()
            .expect("object")
            .insert("report_digest".into(), Value::String(d));
        v
    }
}

/// Copy of `v` without any `timing_ms` or `report_digest` fields.
pub fn strip_timing(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.iter()
                .filter(|(k, _)| k.as_str() != TIMING_KEY && k.as_str() != "report_digest")
                .map(|(k, v)| (k.clone(), strip_timing(v)))
                .collect(),
        ),
        Value::Array(a) => Value::Array(a.iter().map(strip_timing).collect()),
        other => other.clone(),
    }
}

/// SHA-256 of the compact JSON rendering (keys sorted), hex encoded.
pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("JSON value serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_timing() {
        let mut r = Report::new("validate", "b", &json!({"a": 1}));
        r.check::<()>("x", false, || Ok(Verdict::pass())).unwrap();
        let a = r.to_json(false);
        let mut r2 = Report::new("validate", "b", &json!({"a": 1}));
        r2.check::<()>("x", false, || Ok(Verdict::pass())).unwrap();
        r2.checks[0].timing_ms += 5.0;
        let b = r2.to_json(false);
        assert_eq!(a["report_digest"], b["report_digest"]);
        assert_eq!(strip_timing(&a), strip_timing(&b));
    }

    #[test]
    fn heuristics_only_count_when_strict() {
        let mut r = Report::new("validate", "f", &json!(null));
        let w = metrikos::Witness::new(
            metrikos::WitnessKind::F2Threshold,
            "f(t) < threshold",
            metrikos::Cmp::Lt,
            1.0,
            0.0,
            metrikos::Tol::default(),
        );
        r.check::<()>("f2", true, || Ok(Verdict::fail(w))).unwrap();
        assert_eq!(r.exit_code(false), EXIT_PASS);
        assert_eq!(r.exit_code(true), EXIT_FAIL);
    }
}
