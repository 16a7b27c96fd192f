//! Random space generation, validation and witness shrinking.

use metrikos::axioms::{check_b, check_f_metric, check_theta_metric};
use metrikos::expr::BinaryFn;
use metrikos::{BParams, DistanceSpace, FParams, SpaceData, ThetaParams, Tol, Verdict, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{FuzzConfig, Generator, Job, Structure};
use crate::error::InputError;
use crate::report::Report;

pub const DEFAULT_TRIALS: usize = 100;
const MAX_REJECTIONS: usize = 1000;

/// Raw material of one random space; shrinking edits this, not the matrix.
#[derive(Debug, Clone, PartialEq)]
enum Sample {
    /// Points in `R^dim` under `|x-y|^power`.
    Coords { points: Vec<Vec<f64>>, power: i32 },
    Line { points: Vec<f64> },
    Matrix { matrix: Vec<Vec<f64>> },
}

impl Sample {
    fn len(&self) -> usize {
        match self {
            Sample::Coords { points, .. } => points.len(),
            Sample::Line { points } => points.len(),
            Sample::Matrix { matrix } => matrix.len(),
        }
    }

    fn subset(&self, keep: &[usize]) -> Sample {
        match self {
            Sample::Coords { points, power } => Sample::Coords {
                points: keep.iter().map(|&i| points[i].clone()).collect(),
                power: *power,
            },
            Sample::Line { points } => Sample::Line {
                points: keep.iter().map(|&i| points[i]).collect(),
            },
            Sample::Matrix { matrix } => Sample::Matrix {
                matrix: keep.iter().map(|&i| keep.iter().map(|&j| matrix[i][j]).collect()).collect(),
            },
        }
    }

    fn rounded(&self, decimals: i32) -> Sample {
        let scale = 10f64.powi(decimals);
        let r = |v: f64| (v * scale).round() / scale;
        match self {
            Sample::Coords { points, power } => Sample::Coords {
                points: points.iter().map(|p| p.iter().map(|&v| r(v)).collect()).collect(),
                power: *power,
            },
            Sample::Line { points } => Sample::Line {
                points: points.iter().map(|&v| r(v)).collect(),
            },
            Sample::Matrix { matrix } => Sample::Matrix {
                matrix: matrix.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect(),
            },
        }
    }

    fn matrix(&self, formula: Option<&BinaryFn>) -> Option<Vec<Vec<f64>>> {
        match self {
            Sample::Coords { points, power } => Some(
                points
                    .iter()
                    .map(|p| {
                        points
                            .iter()
                            .map(|q| {
                                let sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                                if *power == 2 {
                                    sq
                                } else {
                                    sq.sqrt().powi(*power)
                                }
                            })
                            .collect()
                    })
                    .collect(),
            ),
            Sample::Line { points } => {
                let f = formula?;
                points
                    .iter()
                    .map(|&x| points.iter().map(|&y| f.eval(x, y).ok()).collect())
                    .collect()
            }
            Sample::Matrix { matrix } => Some(matrix.clone()),
        }
    }

    fn coordinates(&self) -> Option<serde_json::Value> {
        match self {
            Sample::Coords { points, .. } => Some(json!(points)),
            Sample::Line { points } => Some(json!(points)),
            Sample::Matrix { .. } => None,
        }
    }
}

/// Which validator runs on each generated space.
#[derive(Debug, Clone)]
enum Validator {
    B(BParams<f64>),
    F(FParams<f64>),
    Theta(ThetaParams),
}

impl Validator {
    fn run(&self, space: &DistanceSpace<f64>, tol: Tol<f64>) -> metrikos::Result<Verdict<f64>> {
        match self {
            Validator::B(p) => Ok(check_b(space, *p, tol)),
            Validator::F(p) => check_f_metric(space, p, tol),
            Validator::Theta(t) => check_theta_metric(space, t, tol),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub trial: usize,
    pub trial_seed: u64,
    pub original_points: usize,
    pub shrunk_points: usize,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<serde_json::Value>,
    pub witness: Witness<f64>,
}

struct Setup {
    cfg: FuzzConfig,
    formula: Option<BinaryFn>,
    validator: Validator,
    tol: Tol<f64>,
}

impl Setup {
    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<Sample, InputError> {
        let c = &self.cfg;
        let n = c.points;
        Ok(match c.generator {
            Generator::Euclidean | Generator::EuclideanSquared => Sample::Coords {
                points: (0..n)
                    .map(|_| (0..c.dim).map(|_| rng.gen_range(0.0..c.side)).collect())
                    .collect(),
                power: if c.generator == Generator::Euclidean { 1 } else { 2 },
            },
            Generator::Formula => Sample::Line {
                points: (0..n).map(|_| rng.gen_range(0.0..c.side)).collect(),
            },
            Generator::RandomMatrix => {
                let [lo, hi] = c.range;
                for _ in 0..MAX_REJECTIONS {
                    let raw: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect()).collect();
                    let mut m = vec![vec![0.0; n]; n];
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                m[i][j] = (raw[i][j] + raw[j][i]) / 2.0;
                            }
                        }
                    }
                    let ok = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j] > 0.0));
                    if ok {
                        return Ok(Sample::Matrix { matrix: m });
                    }
                }
                return Err(InputError::Config(format!(
                    "fuzz.range {lo}..{hi}: no valid matrix after {MAX_REJECTIONS} draws"
                )));
            }
        })
    }

    /// The validator's failing verdict on `sample`, if the sample forms a
    /// valid space and fails.
    fn violation(&self, sample: &Sample, labels: &[String]) -> Option<(DistanceSpace<f64>, Witness<f64>)> {
        let m = sample.matrix(self.formula.as_ref())?;
        let space = DistanceSpace::new(SpaceData::new(labels.to_vec(), m), self.tol).ok()?;
        let w = self.validator.run(&space, self.tol).ok()?.witness?;
        Some((space, w))
    }

    fn trial(&self, seed: u64, trial: usize) -> Result<Option<Finding>, InputError> {
        let trial_seed = seed.wrapping_add(trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let mut sample = self.generate(&mut rng)?;
        let mut labels: Vec<String> = (0..sample.len()).map(|i| format!("p{i}")).collect();
        let m = sample
            .matrix(self.formula.as_ref())
            .ok_or_else(|| InputError::Config("fuzz formula cannot be evaluated on generated points".into()))?;
        let space = DistanceSpace::new(SpaceData::new(labels.clone(), m), self.tol).map_err(|e| {
            InputError::Config(format!("fuzz generator produced an invalid space: {e}"))
        })?;
        let verdict = self.validator.run(&space, self.tol).map_err(|e| InputError::core("fuzz validator", e))?;
        let Some(mut witness) = verdict.witness else {
            return Ok(None);
        };
        let original = sample.len();
        let mut space = space;
        if self.cfg.shrink {
            'outer: loop {
                for i in 0..sample.len() {
                    let keep: Vec<usize> = (0..sample.len()).filter(|&j| j != i).collect();
                    let smaller = sample.subset(&keep);
                    let smaller_labels: Vec<String> = keep.iter().map(|&j| labels[j].clone()).collect();
                    if let Some((s, w)) = self.violation(&smaller, &smaller_labels) {
                        sample = smaller;
                        labels = smaller_labels;
                        space = s;
                        witness = w;
                        continue 'outer;
                    }
                }
                break;
            }
            for decimals in 0..=3 {
                let r = sample.rounded(decimals);
                if let Some((s, w)) = self.violation(&r, &labels) {
                    sample = r;
                    space = s;
                    witness = w;
                    break;
                }
            }
        }
        Ok(Some(Finding {
            trial,
            trial_seed,
            original_points: original,
            shrunk_points: sample.len(),
            labels,
            matrix: space.matrix().to_vec(),
            coordinates: sample.coordinates(),
            witness,
        }))
    }
}

pub fn fuzz(job: &Job) -> Result<Report, InputError> {
    let seed = job
        .seed
        .ok_or_else(|| InputError::Config("fuzz needs a seed (use --seed or \"seed\" in the config)".into()))?;
    let trials = job.trials.unwrap_or(DEFAULT_TRIALS);
    let cfg = job.fuzz.clone().unwrap_or_default();
    if cfg.points == 0 || cfg.dim == 0 || !(cfg.side > 0.0 && cfg.side.is_finite()) {
        return Err(InputError::Config("fuzz: points, dim and box must be positive".into()));
    }
    let [lo, hi] = cfg.range;
    if cfg.generator == Generator::RandomMatrix && !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(InputError::Config(format!("fuzz.range must satisfy lo < hi, got [{lo}, {hi}]")));
    }
    let formula = match (&cfg.generator, &cfg.formula) {
        (Generator::Formula, None) => {
            return Err(InputError::Config("fuzz generator formula needs fuzz.formula".into()));
        }
        (_, Some(src)) => Some(BinaryFn::distance(src).map_err(|source| InputError::Dsl {
            field: "fuzz.formula".into(),
            source,
        })?),
        (_, None) => None,
    };
    let validator = match job.structure {
        Structure::B => {
            let k = job
                .params
                .k
                .ok_or_else(|| InputError::Config("fuzzing structure b needs K".into()))?;
            Validator::B(BParams::new(k).map_err(|e| InputError::core("K", e))?)
        }
        Structure::F => Validator::F(
            FParams::new(job.params.f.clone().expect("structure f carries f"), job.params.alpha)
                .map_err(|e| InputError::core("f", e))?,
        ),
        Structure::Theta => Validator::Theta(ThetaParams::new(
            job.params.theta.clone().expect("structure theta carries theta"),
        )),
    };
    let setup = Setup {
        cfg,
        formula,
        validator,
        tol: job.tol,
    };
    let results: Vec<Result<Option<Finding>, InputError>> =
        (0..trials).into_par_iter().map(|t| setup.trial(seed, t)).collect();
    let mut findings = Vec::new();
    for r in results {
        if let Some(f) = r? {
            findings.push(f);
        }
    }
    let mut report = Report::new("fuzz", job.structure, &job.canonical);
    let expect = setup.cfg.expect_failure;
    if expect && findings.is_empty() {
        report.fail(json!({"reason": "violations were expected but none was found", "trials": trials}));
    }
    if !expect && !findings.is_empty() {
        report.fail(json!({
            "reason": "unexpected violations",
            "count": findings.len(),
            "first_trial": findings[0].trial,
        }));
    }
    report.section(
        "fuzz",
        json!({
            "generator": setup.cfg.generator,
            "points": setup.cfg.points,
            "dim": setup.cfg.dim,
            "box": setup.cfg.side,
            "formula": setup.cfg.formula,
            "trials": trials,
            "seed": seed,
            "expect_failure": expect,
            "violations": findings.len(),
            "findings": findings,
        }),
    );
    Ok(report)
}
