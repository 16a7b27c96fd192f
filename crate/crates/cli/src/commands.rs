//! The `validate`, `regularity` and `metrize` pipelines.

use metrikos::axioms::{
    check_action_axioms, check_b, check_chain_bound, check_f1_monotone, check_f2_limit, check_f_metric,
    check_theta_metric, default_action_grid, geometric_grid, min_b_constant, refine_grid, ActionAxiom,
    DecaySchedule,
};
use metrikos::expr::ScalarFn;
use metrikos::metrize::{
    chain_metric, check_f_sandwich, check_metric_axioms, distortion_report, f_sandwich, WeightTransform,
};
use metrikos::regularity::{
    cross_check_conditions, delta_theta_at_origin, locally_regular_phi, phi_from_f, r_for_b, r_from_f,
    replay_iii_a, uniform_phi, verify_iii_c, LevelSearch, RegularityCertificate,
};
use metrikos::{check_distance_axioms, BParams, DistanceSpace, FParams, ThetaParams, Verdict};
use serde_json::{json, Value};

use crate::config::{Job, Structure};
use crate::error::InputError;
use crate::report::Report;

type Res<T> = Result<T, InputError>;

fn core<T>(context: &str, r: metrikos::Result<T>) -> Res<T> {
    r.map_err(|e| InputError::core(context, e))
}

fn f_params(job: &Job) -> Res<FParams<f64>> {
    let f = job.params.f.clone().expect("structure f carries f");
    core("f", FParams::new(f, job.params.alpha))
}

fn theta_params(job: &Job) -> ThetaParams {
    ThetaParams::new(job.params.theta.clone().expect("structure theta carries theta"))
}

fn level_search(job: &Job) -> Res<LevelSearch<f64>> {
    match &job.grids.search {
        None => Ok(LevelSearch::default()),
        Some(s) => {
            if s.lo_exp > s.hi_exp {
                return Err(InputError::Config("grids.search: lo_exp exceeds hi_exp".into()));
            }
            core("grids.search", LevelSearch::new(geometric_grid(2.0, s.lo_exp, s.hi_exp), s.resolution))
        }
    }
}

/// Distance axioms plus the structure's validators. Returns the validated
/// space when every regular check passed.
pub fn run_validation(job: &Job, report: &mut Report) -> Res<Option<DistanceSpace<f64>>> {
    let data = job
        .space
        .as_ref()
        .ok_or_else(|| InputError::Config("no space given (use --space <file>)".into()))?;
    let tol = job.tol;
    if !report.check("distance_axioms", false, || core("space", check_distance_axioms(data, tol)))? {
        return Ok(None);
    }
    let space = core("space", DistanceSpace::new(data.clone(), tol))?;
    match job.structure {
        Structure::B => {
            let k_min = min_b_constant(&space);
            let k = job.params.k.unwrap_or(k_min);
            let params = core("K", BParams::new(k))?;
            report.check("b_triangle", false, || -> Res<_> {
                Ok(check_b(&space, params, tol).with_cert("K", k))
            })?;
            report.section("constants", json!({"K": k, "K_min": k_min, "K_given": job.params.k.is_some()}));
        }
        Structure::F => {
            let params = f_params(job)?;
            report.check("f_chain", false, || core("f", check_f_metric(&space, &params, tol)))?;
            let (lo, hi) = job.grids.monotone.as_ref().map_or((-6, 3), |g| (g.lo_exp, g.hi_exp));
            let grid = geometric_grid(10.0, lo, hi);
            report.check("f1_monotone", false, || core("f", check_f1_monotone(&params.f, &grid, tol)))?;
            let schedule = job
                .grids
                .decay
                .as_ref()
                .map_or(DecaySchedule::new(1.0, 0.1, 3), |d| DecaySchedule::new(d.t0, d.q, d.drops));
            report.check("f2_limit", true, || core("grids.decay", check_f2_limit(&params.f, schedule, tol)))?;
        }
        Structure::Theta => {
            let theta = theta_params(job);
            let mut grid = job.grids.action.clone().unwrap_or_else(default_action_grid);
            let exact = [ActionAxiom::Origin, ActionAxiom::Monotone, ActionAxiom::Bound];
            for level in 0..=job.grids.action_refinements {
                let name = if level == 0 {
                    "b_action".to_string()
                } else {
                    format!("b_action_refined[{level}]")
                };
                report.check(&name, false, || core("grids.action", check_action_axioms(&theta, &grid, &exact, tol)))?;
                report.check(&format!("{name}_solvable"), true, || {
                    core("grids.action", check_action_axioms(&theta, &grid, &[ActionAxiom::Solvable], tol))
                })?;
                grid = refine_grid(&grid);
            }
            report.check("theta_triangle", false, || core("theta", check_theta_metric(&space, &theta, tol)))?;
            for (i, chain) in job.chains.iter().enumerate() {
                report.check(&format!("chain_bound[{i}]"), false, || {
                    core("chains", check_chain_bound(&space, &theta, chain, tol))
                })?;
            }
        }
    }
    Ok(report.all_checks_pass().then_some(space))
}

pub fn validate(job: &Job) -> Res<Report> {
    let mut report = Report::new("validate", job.structure, &job.canonical);
    run_validation(job, &mut report)?;
    Ok(report)
}

fn anchors(job: &Job, space: &DistanceSpace<f64>) -> Res<Vec<String>> {
    match &job.anchors {
        None => Ok(space.labels().to_vec()),
        Some(list) => {
            for a in list {
                core("anchor", space.index_of(a))?;
            }
            Ok(list.clone())
        }
    }
}

fn replayed(cert: &RegularityCertificate<f64>, verdicts: Vec<(Option<String>, Verdict<f64>)>) -> (Value, bool) {
    let pass = verdicts.iter().all(|(_, v)| v.pass);
    let witness = verdicts
        .iter()
        .find_map(|(a, v)| v.witness.as_ref().map(|w| json!({"anchor": a, "witness": w})));
    let mut v = serde_json::to_value(cert).unwrap_or(Value::Null);
    v["replay"] = json!({
        "pass": pass,
        "anchors": verdicts.len(),
        "failure": witness,
    });
    (v, pass)
}

fn record(report: &mut Report, label: &str, cert: &RegularityCertificate<f64>, verdicts: Vec<(Option<String>, Verdict<f64>)>) {
    let (mut v, pass) = replayed(cert, verdicts);
    v["source"] = Value::String(label.to_string());
    if !pass {
        report.fail(json!({"reason": "certificate replay failed", "certificate": v.clone()}));
    }
    report.push_to("certificates", v);
}

fn not_found(report: &mut Report, label: &str, scale: f64, search: &LevelSearch<f64>, err: &metrikos::Error) {
    report.fail(json!({
        "reason": err.to_string(),
        "source": label,
        "scale": scale,
        "search": {
            "grid_lo": search.grid.first(),
            "grid_hi": search.grid.last(),
            "grid_points": search.grid.len(),
            "resolution": search.resolution,
        },
    }));
}

/// Replays `verify_iii_c(a, k, r)` at each anchor.
fn iii_c_replays(space: &DistanceSpace<f64>, anchors: &[String], k: f64, r: f64, job: &Job) -> Res<Vec<(Option<String>, Verdict<f64>)>> {
    anchors
        .iter()
        .map(|a| Ok((Some(a.clone()), core("replay", verify_iii_c(space, a, k, r, job.tol))?)))
        .collect()
}

pub fn regularity(job: &Job) -> Res<Report> {
    let mut report = Report::new("regularity", job.structure, &job.canonical);
    let Some(space) = run_validation(job, &mut report)? else {
        return Ok(report);
    };
    let anchors = anchors(job, &space)?;
    let tol = job.tol;
    let search = level_search(job)?;
    match job.structure {
        Structure::B => {
            let k = job.params.k.unwrap_or_else(|| min_b_constant(&space));
            let params = core("K", BParams::new(k))?;
            for &t in &job.k {
                let cert = core("k", r_for_b(params, t))?;
                let replays = iii_c_replays(&space, &anchors, t, cert.value, job)?;
                record(&mut report, "r = t/K", &cert, replays);
            }
        }
        Structure::F => {
            let params = f_params(job)?;
            for &eps in &job.eps {
                match phi_from_f(&params, eps, &search, tol) {
                    Ok(cert) => {
                        let v = core("replay", replay_iii_a(&space, None, cert.value, eps, tol))?;
                        record(&mut report, "phi = delta/2", &cert, vec![(None, v)]);
                    }
                    Err(e @ metrikos::Error::CertificateNotFound(_)) => not_found(&mut report, "phi = delta/2", eps, &search, &e),
                    Err(e) => return Err(InputError::core("eps", e)),
                }
            }
            for &k in &job.k {
                match r_from_f(&params, k, &search, tol) {
                    Ok(cert) => {
                        let replays = iii_c_replays(&space, &anchors, k, cert.value, job)?;
                        record(&mut report, "r from f", &cert, replays);
                    }
                    Err(e @ metrikos::Error::CertificateNotFound(_)) => not_found(&mut report, "r from f", k, &search, &e),
                    Err(e) => return Err(InputError::core("k", e)),
                }
            }
        }
        Structure::Theta => {
            let theta = theta_params(job);
            for &k in &job.k {
                match delta_theta_at_origin(&theta, k, &search, tol) {
                    Ok(cert) => {
                        let replays = iii_c_replays(&space, &anchors, k, cert.value, job)?;
                        record(&mut report, "delta/sqrt(2)", &cert, replays);
                    }
                    Err(e @ metrikos::Error::CertificateNotFound(_)) => not_found(&mut report, "delta/sqrt(2)", k, &search, &e),
                    Err(e) => return Err(InputError::core("k", e)),
                }
            }
        }
    }
    for &eps in &job.eps {
        for a in &anchors {
            match core("eps", locally_regular_phi(&space, a, eps, tol))? {
                Some(cert) => {
                    let v = core("replay", replay_iii_a(&space, Some(a), cert.value, eps, tol))?;
                    record(&mut report, "local grid search", &cert, vec![(Some(a.clone()), v)]);
                }
                None => report.fail(json!({"reason": "no iii-A certificate among candidate scales", "anchor": a, "scale": eps})),
            }
        }
        match core("eps", uniform_phi(&space, eps, tol))? {
            Some(cert) => {
                let v = core("replay", replay_iii_a(&space, None, cert.value, eps, tol))?;
                record(&mut report, "uniform grid search", &cert, vec![(None, v)]);
            }
            None => report.fail(json!({"reason": "no uniform certificate among candidate scales", "scale": eps})),
        }
    }
    report.check("cross_check", false, || core("eps", cross_check_conditions(&space, &job.eps, tol)))?;
    report.section("cross_check_convention", "iii-C compared at k = eps");
    Ok(report)
}

/// `identity`, `power:<x>`, `snowflake` or `custom:<expr in t>`.
pub fn parse_transform(src: &str, space: &DistanceSpace<f64>, k_min: f64) -> Res<WeightTransform<f64>> {
    let src = src.trim();
    let bad = |msg: String| InputError::Config(format!("transform: {msg}"));
    if src == "identity" {
        return Ok(WeightTransform::Identity);
    }
    if src == "snowflake" {
        return core("transform", WeightTransform::snowflake(k_min));
    }
    if let Some(x) = src.strip_prefix("power:") {
        let e = crate::config::constant("transform", x)?;
        return core("transform", WeightTransform::power(e));
    }
    if let Some(expr) = src.strip_prefix("custom:") {
        let f = ScalarFn::parse(expr).map_err(|source| InputError::Dsl {
            field: "transform".into(),
            source,
        })?;
        return core("transform", WeightTransform::custom(f, &space.distinct_distances()));
    }
    Err(bad(format!("unknown transform {src:?} (expected identity, power:<x>, snowflake or custom:<expr>)")))
}

pub fn metrize(job: &Job) -> Res<Report> {
    let mut report = Report::new("metrize", job.structure, &job.canonical);
    let Some(space) = run_validation(job, &mut report)? else {
        return Ok(report);
    };
    let tol = job.tol;
    let k_min = min_b_constant(&space);
    let default = match job.structure {
        Structure::B => "snowflake",
        Structure::F | Structure::Theta => "identity",
    };
    let transform = parse_transform(job.transform.as_deref().unwrap_or(default), &space, k_min)?;
    let result = core("chain metric", chain_metric(&space, &transform))?;
    report.check("metric_axioms", false, || -> Res<_> {
        Ok(check_metric_axioms(&result.labels, &result.metric, tol))
    })?;
    let b = match job.structure {
        Structure::B => Some(core("K", BParams::new(k_min))?),
        _ => None,
    };
    let distortion = core("distortion", distortion_report(&result, &space, b))?;
    let mut metric = serde_json::to_value(&result).unwrap_or(Value::Null);
    metric["labels"] = json!(result.labels);
    metric["distortion"] = serde_json::to_value(&distortion).unwrap_or(Value::Null);
    if b.is_some() {
        metric["K_min"] = json!(k_min);
    }
    report.section("metric", metric);
    if job.structure == Structure::F {
        let params = f_params(job)?;
        report.check("f_sandwich", false, || core("f", check_f_sandwich(&space, &params, tol)))?;
        report.section("sandwich", core("f", f_sandwich(&space, &params, tol))?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, RawConfig};
    use std::path::Path;

    fn job(v: Value) -> Job {
        let raw: RawConfig = serde_json::from_value(v).unwrap();
        Job::resolve(raw, Path::new(""), &Overrides::default(), true).unwrap()
    }

    fn squared() -> Value {
        json!({"points": [0, 1, 2], "formula": "(x-y)^2"})
    }

    #[test]
    fn validate_b_reports_k_min() {
        let r = validate(&job(json!({"structure": "b", "space": squared(), "params": {"K": 2}}))).unwrap();
        let v = r.to_json(false);
        assert_eq!(v["pass"], true);
        assert_eq!(v["constants"]["K_min"], 2.0);
    }

    #[test]
    fn validate_f_fails_on_ln_zero() {
        let r = validate(&job(json!({"structure": "f", "space": squared(), "params": {"f": "ln(t)", "alpha": 0}}))).unwrap();
        let v = r.to_json(false);
        assert_eq!(v["exit_code"], 1);
        let w = &v["checks"][1]["verdict"]["witness"];
        assert_eq!(w["points"], json!(["0", "2"]));
    }

    #[test]
    fn transform_parsing() {
        let s = DistanceSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(parse_transform("identity", &s, 2.0).unwrap(), WeightTransform::Identity);
        assert_eq!(parse_transform("power:0.5", &s, 2.0).unwrap(), WeightTransform::Power { epsilon: 0.5 });
        assert_eq!(parse_transform("snowflake", &s, 2.0).unwrap(), WeightTransform::Power { epsilon: 0.5 });
        assert!(parse_transform("power:2", &s, 2.0).is_err());
        assert!(parse_transform("cube", &s, 2.0).is_err());
        assert!(parse_transform("custom:sqrt(t)", &s, 2.0).is_ok());
    }
}
