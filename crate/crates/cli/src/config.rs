//! Job configuration: JSON file plus command-line overrides, resolved into a
//! validated [`Job`].

use std::fs;
use std::path::{Path, PathBuf};

use metrikos::expr::{evaluate, parse, BinaryFn, ScalarFn};
use metrikos::{SpaceData, Tol};
use serde::{Deserialize, Serialize};

use crate::error::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    B,
    F,
    Theta,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::B => "b",
            Structure::F => "f",
            Structure::Theta => "theta",
        }
    }
}

impl std::str::FromStr for Structure {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "b" => Ok(Structure::B),
            "f" => Ok(Structure::F),
            "theta" => Ok(Structure::Theta),
            other => Err(InputError::Config(format!("unknown structure {other:?} (expected b, f or theta)"))),
        }
    }
}

/// A real given either as a JSON number or as a constant DSL expression
/// such as `"ln(3)"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Expr(String),
}

impl Number {
    pub fn resolve(&self, field: &str) -> Result<f64, InputError> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Expr(src) => constant(field, src),
        }
    }
}

pub fn constant(field: &str, src: &str) -> Result<f64, InputError> {
    if let Ok(v) = src.trim().parse::<f64>() {
        return Ok(v);
    }
    let e = parse(src, &[]).map_err(|source| InputError::Dsl {
        field: field.to_string(),
        source,
    })?;
    evaluate::<f64>(&e, &[]).map_err(|e| InputError::Config(format!("{field}: {e}")))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpRange {
    pub lo_exp: i32,
    pub hi_exp: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub lo_exp: i32,
    pub hi_exp: i32,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub t0: f64,
    pub q: f64,
    pub drops: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsConfig {
    /// Action grid; must start at 0. Default `{0} ∪ {2^-10..2^4}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<f64>>,
    #[serde(default)]
    pub action_refinements: u32,
    /// Function-relative search grid `2^lo_exp..2^hi_exp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchConfig>,
    /// Monotonicity grid `10^lo_exp..10^hi_exp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<ExpRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Euclidean,
    EuclideanSquared,
    RandomMatrix,
    Formula,
}

impl std::str::FromStr for Generator {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| InputError::Config(format!("unknown generator {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzConfig {
    pub generator: Generator,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(rename = "box", default = "default_box")]
    pub side: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Distance formula in `x, y` for the `formula` generator (1-D points).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    /// Entry range for `random_matrix`.
    #[serde(default = "default_range")]
    pub range: [f64; 2],
    /// Violations are expected; the run fails if none is found.
    #[serde(default)]
    pub expect_failure: bool,
    #[serde(default = "default_true")]
    pub shrink: bool,
}

fn default_points() -> usize {
    6
}
fn default_dim() -> usize {
    2
}
fn default_box() -> f64 {
    10.0
}
fn default_range() -> [f64; 2] {
    [0.1, 10.0]
}
fn default_true() -> bool {
    true
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            generator: Generator::EuclideanSquared,
            points: default_points(),
            dim: default_dim(),
            side: default_box(),
            trials: None,
            formula: None,
            range: default_range(),
            expect_failure: false,
            shrink: true,
        }
    }
}

/// Inline space, analytic space, or path to a JSON file holding either.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSource {
    Path(String),
    Inline(serde_json::Value),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub structure: Option<Structure>,
    #[serde(default)]
    pub space: Option<SpaceSource>,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    #[serde(default)]
    pub anchors: Option<Vec<String>>,
    #[serde(default)]
    pub transform: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub grids: GridsConfig,
    #[serde(default)]
    pub chains: Vec<Vec<String>>,
    #[serde(default)]
    pub fuzz: Option<FuzzConfig>,
}

/// Command-line overrides; `None` leaves the config value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub structure: Option<String>,
    pub space: Option<PathBuf>,
    pub k: Option<String>,
    pub f: Option<String>,
    pub alpha: Option<String>,
    pub theta: Option<String>,
    pub eps: Option<Vec<f64>>,
    pub k_scales: Option<Vec<f64>>,
    pub anchors: Option<Vec<String>>,
    pub transform: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub strict: bool,
}

/// Structure parameters after parsing.
#[derive(Debug, Clone)]
pub struct Params {
    pub k: Option<f64>,
    pub f: Option<ScalarFn>,
    pub alpha: f64,
    pub theta: Option<BinaryFn>,
}

pub const DEFAULT_SCALES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// A fully resolved job. `space` is `None` only for fuzzing.
#[derive(Debug, Clone)]
pub struct Job {
    pub structure: Structure,
    pub space: Option<SpaceData<f64>>,
    pub params: Params,
    pub eps: Vec<f64>,
    pub k: Vec<f64>,
    pub anchors: Option<Vec<String>>,
    pub transform: Option<String>,
    pub tol: Tol<f64>,
    pub strict: bool,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub grids: GridsConfig,
    pub chains: Vec<Vec<String>>,
    pub fuzz: Option<FuzzConfig>,
    /// Canonical echo of the resolved inputs, hashed into the report.
    pub canonical: serde_json::Value,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn json_from(path: &Path, text: &str) -> Result<serde_json::Value, InputError> {
    serde_json::from_str(text).map_err(|source| InputError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Reads `{"labels", "matrix"}` or `{"points", "formula"}`.
pub fn space_from_value(origin: &str, v: &serde_json::Value) -> Result<SpaceData<f64>, InputError> {
    let schema = |msg: String| InputError::Schema {
        origin: origin.to_string(),
        message: msg,
    };
    let obj = v.as_object().ok_or_else(|| schema("space must be a JSON object".into()))?;
    if obj.contains_key("matrix") {
        let keys_ok = obj.keys().all(|k| k == "matrix" || k == "labels");
        if !keys_ok {
            return Err(schema("matrix space allows only \"labels\" and \"matrix\"".into()));
        }
        return serde_json::from_value(v.clone()).map_err(|e| schema(e.to_string()));
    }
    if obj.contains_key("points") {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Analytic {
            points: Vec<f64>,
            formula: String,
        }
        let a: Analytic = serde_json::from_value(v.clone()).map_err(|e| schema(e.to_string()))?;
        let formula = BinaryFn::distance(&a.formula).map_err(|source| InputError::Dsl {
            field: format!("{origin}: formula"),
            source,
        })?;
        let sp = metrikos::space_from_points(&a.points, &formula, Tol::default());
        return match sp {
            Ok(s) => Ok(s.to_data()),
            // axiom failures are reported as a failed check, not an input error
            Err(metrikos::Error::AxiomViolation(_)) => {
                let labels: Vec<String> = a.points.iter().map(|p| p.to_string()).collect();
                let mut m = Vec::new();
                for &x in &a.points {
                    let mut row = Vec::new();
                    for &y in &a.points {
                        row.push(formula.eval(x, y).map_err(|e| schema(e.to_string()))?);
                    }
                    m.push(row);
                }
                Ok(SpaceData::new(labels, m))
            }
            Err(e) => Err(InputError::Core {
                context: origin.to_string(),
                source: e,
            }),
        };
    }
    Err(schema("space needs either \"matrix\" or \"points\" and \"formula\"".into()))
}

pub fn load_space_file(path: &Path) -> Result<SpaceData<f64>, InputError> {
    let text = read(path)?;
    let v = json_from(path, &text)?;
    space_from_value(&path.display().to_string(), &v)
}

fn parse_fn(field: &str, src: &str) -> Result<ScalarFn, InputError> {
    ScalarFn::parse(src).map_err(|source| InputError::Dsl {
        field: field.to_string(),
        source,
    })
}

fn parse_action(field: &str, src: &str) -> Result<BinaryFn, InputError> {
    BinaryFn::action(src).map_err(|source| InputError::Dsl {
        field: field.to_string(),
        source,
    })
}

fn positive_list(name: &str, v: &[f64]) -> Result<(), InputError> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(InputError::Config(format!("{name} must be a nonempty list of positive numbers")));
    }
    Ok(())
}

impl Job {
    /// Loads `config` (if any), applies `overrides`, and validates.
    /// `need_space` is false for fuzzing.
    pub fn load(config: Option<&Path>, overrides: &Overrides, need_space: bool) -> Result<Job, InputError> {
        let (raw, base) = match config {
            Some(path) => {
                let text = read(path)?;
                let raw: RawConfig = serde_json::from_str(&text).map_err(|source| InputError::Json {
                    path: path.display().to_string(),
                    source,
                })?;
                (raw, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (RawConfig::default(), PathBuf::new()),
        };
        Self::resolve(raw, &base, overrides, need_space)
    }

    pub fn resolve(mut raw: RawConfig, base: &Path, o: &Overrides, need_space: bool) -> Result<Job, InputError> {
        if let Some(s) = &o.structure {
            raw.structure = Some(s.parse()?);
        }
        let structure = raw
            .structure
            .ok_or_else(|| InputError::Config("no structure given (use --structure b|f|theta)".into()))?;
        let space = match (&o.space, &raw.space) {
            (Some(path), _) => Some(load_space_file(path)?),
            (None, Some(SpaceSource::Path(p))) => Some(load_space_file(&base.join(p))?),
            (None, Some(SpaceSource::Inline(v))) => Some(space_from_value("config space", v)?),
            (None, None) if need_space => {
                return Err(InputError::Config("no space given (use --space <file>)".into()));
            }
            (None, None) => None,
        };

        let k_src = o.k.clone().map(Number::Expr).or(raw.params.k.clone());
        let k = k_src.map(|n| n.resolve("K")).transpose()?;
        if let Some(k) = k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(InputError::Config(format!("K must be positive, got {k}")));
            }
        }
        let f_src = o.f.clone().or(raw.params.f.clone());
        let f = f_src.as_deref().map(|s| parse_fn("f", s)).transpose()?;
        let alpha_src = o.alpha.clone().map(Number::Expr).or(raw.params.alpha.clone());
        let alpha_src_given = alpha_src.is_some();
        let alpha = alpha_src.map(|n| n.resolve("alpha")).transpose()?.unwrap_or(0.0);
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(InputError::Config(format!("alpha must be >= 0, got {alpha}")));
        }
        let theta_src = o.theta.clone().or(raw.params.theta.clone());
        let theta = theta_src.as_deref().map(|s| parse_action("theta", s)).transpose()?;
        let foreign = match structure {
            Structure::B => [("f", f.is_some()), ("alpha", alpha_src_given), ("theta", theta.is_some())],
            Structure::F => [("K", k.is_some()), ("theta", theta.is_some()), ("", false)],
            Structure::Theta => [("K", k.is_some()), ("f", f.is_some()), ("alpha", alpha_src_given)],
        };
        if let Some((name, _)) = foreign.iter().find(|(_, given)| *given) {
            return Err(InputError::Config(format!(
                "parameter {name} does not belong to structure {}",
                structure.name()
            )));
        }
        match structure {
            Structure::F if f.is_none() => return Err(InputError::Config("structure f needs params.f".into())),
            Structure::Theta if theta.is_none() => {
                return Err(InputError::Config("structure theta needs params.theta".into()))
            }
            _ => {}
        }

        let eps = o.eps.clone().or(raw.eps).unwrap_or_else(|| DEFAULT_SCALES.to_vec());
        positive_list("eps", &eps)?;
        let k_scales = o.k_scales.clone().or(raw.k).unwrap_or_else(|| DEFAULT_SCALES.to_vec());
        positive_list("k", &k_scales)?;
        let tol = o.tol.or(raw.tol).unwrap_or(1e-9);
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(InputError::Config(format!("tol must be >= 0, got {tol}")));
        }
        let transform = o.transform.clone().or(raw.transform);
        let anchors = o.anchors.clone().or(raw.anchors);
        let seed = o.seed.or(raw.seed);
        let trials = o.trials.or(raw.trials).or(raw.fuzz.as_ref().and_then(|f| f.trials));
        if trials == Some(0) {
            return Err(InputError::Config("trials must be at least 1".into()));
        }

        let params_echo = ParamsConfig {
            k: k.map(Number::Value),
            f: f.as_ref().map(|f| f.source().to_string()),
            alpha: (structure == Structure::F).then_some(Number::Value(alpha)),
            theta: theta.as_ref().map(|t| t.source().to_string()),
        };
        let canonical = serde_json::json!({
            "structure": structure,
            "space": space,
            "params": params_echo,
            "eps": eps,
            "k": k_scales,
            "anchors": anchors,
            "transform": transform,
            "tol": tol,
            "strict": o.strict || raw.strict,
            "seed": seed,
            "trials": trials,
            "grids": raw.grids,
            "chains": raw.chains,
            "fuzz": raw.fuzz,
        });
        Ok(Job {
            structure,
            space,
            params: Params { k, f, alpha, theta },
            eps,
            k: k_scales,
            anchors,
            transform,
            tol: Tol::new(tol),
            strict: o.strict || raw.strict,
            seed,
            trials,
            grids: raw.grids,
            chains: raw.chains,
            fuzz: raw.fuzz,
            canonical,
        })
    }
}
