//! Explicit metric on a finite space: minimum chain sums over transformed
//! edge weights, with distortion bounds.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::axioms::chain::min_chain_matrix;
use crate::error::{Error, Result};
use crate::expr::ScalarFn;
use crate::params::{BParams, FParams};
use crate::scalar::{Scalar, Tol};
use crate::space::DistanceSpace;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

/// Edge weight transform `h` applied before taking minimum chains.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightTransform<T> {
    Identity,
    Power { epsilon: T },
    Custom(ScalarFn),
}

impl<T: Scalar> WeightTransform<T> {
    pub fn power(epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon <= T::one()) {
            return Err(Error::Transform(format!("power exponent must lie in (0,1], got {epsilon}")));
        }
        Ok(WeightTransform::Power { epsilon })
    }

    /// Power transform with [`snowflake_exponent`]`(K)`.
    pub fn snowflake(k: T) -> Result<Self> {
        Self::power(snowflake_exponent(k)?)
    }

    /// A custom transform must be positive and non-decreasing on `grid`
    /// (any order).
    pub fn custom(f: ScalarFn, grid: &[T]) -> Result<Self> {
        let mut grid: Vec<T> = grid.iter().copied().filter(|g| *g > T::zero()).collect();
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        let mut prev: Option<(T, T)> = None;
        for &t in &grid {
            let v = f.eval(t)?;
            if !(v > T::zero()) {
                return Err(Error::Transform(format!("{f} is not positive at t={t}")));
            }
            if let Some((pt, pv)) = prev {
                if v < pv {
                    return Err(Error::Transform(format!("{f} decreases between t={pt} and t={t}")));
                }
            }
            prev = Some((t, v));
        }
        Ok(WeightTransform::Custom(f))
    }

    pub fn apply(&self, t: T) -> Result<T> {
        Ok(match self {
            WeightTransform::Identity => t,
            WeightTransform::Power { epsilon } => t.powf(*epsilon),
            WeightTransform::Custom(f) => f.eval(t)?,
        })
    }

    pub fn description(&self) -> String {
        self.to_string()
    }
}

impl<T: Scalar> fmt::Display for WeightTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightTransform::Identity => f.write_str("identity"),
            WeightTransform::Power { epsilon } => write!(f, "power:{epsilon}"),
            WeightTransform::Custom(func) => write!(f, "custom:{func}"),
        }
    }
}

impl<T: Scalar> Serialize for WeightTransform<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `ln 2 / ln(2 max(K, 1))`, in `(0, 1]`.
pub fn snowflake_exponent<T: Scalar>(k: T) -> Result<T> {
    if !(k > T::zero() && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
    }
    let two = T::lit(2.0);
    Ok(two.ln() / (two * k.max(T::one())).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBound<T> {
    pub pair: [String; 2],
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ChainMetricResult<T> {
    pub transform: WeightTransform<T>,
    pub metric: Vec<Vec<T>>,
    pub max_distortion: T,
    /// `None` for a single point.
    pub argmax_pair: Option<[String; 2]>,
    #[serde(skip)]
    pub labels: Vec<String>,
    #[serde(skip)]
    pub per_pair_bounds: Vec<PairBound<T>>,
}

/// Minimum chain sums over weights `h(D(u,v))`. Distortion is
/// `max h(D(x,y)) / d(x,y)` over `x != y`; 1 for a single point.
pub fn chain_metric<T: Scalar>(space: &DistanceSpace<T>, transform: &WeightTransform<T>) -> Result<ChainMetricResult<T>> {
    let n = space.len();
    let mut weights = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = transform.apply(space.d(i, j))?;
            if !(w > T::zero() && w.is_finite()) {
                return Err(Error::Transform(format!(
                    "{transform} gives weight {w} on edge ({},{})",
                    space.label(i),
                    space.label(j)
                )));
            }
            weights[i][j] = w;
        }
    }
    let metric = min_chain_matrix(&weights).into_matrix();
    let mut max_distortion = T::one();
    let mut argmax = None;
    let mut bounds = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let ratio = weights[i][j] / metric[i][j];
            if argmax.is_none() || ratio > max_distortion {
                max_distortion = ratio;
                argmax = Some([space.label(i).to_string(), space.label(j).to_string()]);
            }
            bounds.push(PairBound {
                pair: [space.label(i).to_string(), space.label(j).to_string()],
                lower: metric[i][j],
                upper: weights[i][j],
            });
        }
    }
    Ok(ChainMetricResult {
        transform: transform.clone(),
        metric,
        max_distortion,
        argmax_pair: argmax,
        labels: space.labels().to_vec(),
        per_pair_bounds: bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport<T> {
    pub max_distortion: T,
    pub argmax_pair: Option<[String; 2]>,
    /// Present when the transform is the snowflake power for the given `K`:
    /// whether `max_distortion <= 4` held on this instance.
    pub within_four: Option<bool>,
}

pub fn distortion_report<T: Scalar>(
    result: &ChainMetricResult<T>,
    space: &DistanceSpace<T>,
    params: Option<BParams<T>>,
) -> Result<DistortionReport<T>> {
    if result.metric.len() != space.len() || result.labels != space.labels() {
        return Err(Error::Dimension(format!(
            "metric of side {} does not belong to a space of side {}",
            result.metric.len(),
            space.len()
        )));
    }
    let within_four = match (params, &result.transform) {
        (Some(p), WeightTransform::Power { epsilon }) => {
            let expected = snowflake_exponent(p.k)?;
            ((*epsilon - expected).abs() <= T::default_tol() * expected).then(|| result.max_distortion <= T::lit(4.0))
        }
        _ => None,
    };
    Ok(DistortionReport {
        max_distortion: result.max_distortion,
        argmax_pair: result.argmax_pair.clone(),
        within_four,
    })
}

/// Least `u` in `[lo, hi]` with `f(u) >= f(sp) + α`, by monotone bisection.
/// Errors when `f(lo)` is already above or `f(hi)` below the level.
pub fn f_upper_bound<T: Scalar>(params: &FParams<T>, sp: T, bracket: (T, T), tol: Tol<T>) -> Result<T> {
    let (mut lo, mut hi) = bracket;
    if !(sp > T::zero() && lo > T::zero() && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need sp > 0 and 0 < lo < hi, got sp={sp}, bracket [{lo}, {hi}]"
        )));
    }
    let f = &params.f;
    let target = f.eval(sp)? + params.alpha;
    let straddle_err = || Error::Bracket {
        lo: bracket.0.as_f64(),
        hi: bracket.1.as_f64(),
        target: target.as_f64(),
    };
    if f.eval(hi)? < target || f.eval(lo)? > target + tol.slack(target) {
        return Err(straddle_err());
    }
    if f.eval(lo)? >= target {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.eval(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// [`f_upper_bound`] with the bracket `[sp, 2^j sp]`, doubling up to 64
/// times until `f` reaches the level.
pub fn f_upper_bound_auto<T: Scalar>(params: &FParams<T>, sp: T, tol: Tol<T>) -> Result<T> {
    if !(sp > T::zero()) {
        return Err(Error::InvalidParameter(format!("sp must be positive, got {sp}")));
    }
    let target = params.f.eval(sp)? + params.alpha;
    let mut hi = sp + sp;
    for _ in 0..64 {
        if params.f.eval(hi)? >= target {
            return f_upper_bound(params, sp, (sp, hi), tol);
        }
        hi = hi + hi;
    }
    Err(Error::Bracket {
        lo: sp.as_f64(),
        hi: hi.as_f64(),
        target: target.as_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow<T> {
    pub pair: [String; 2],
    /// Identity chain metric `d(x,y)`.
    pub lower: T,
    pub distance: T,
    /// `f^-1(f(d) + α)`; `None` when `f` never reaches the level.
    pub upper: Option<T>,
}

/// Two-sided bound `d <= D <= f^-1(f(d) + α)` per pair, with `d` the
/// identity chain metric.
pub fn f_sandwich<T: Scalar>(space: &DistanceSpace<T>, params: &FParams<T>, tol: Tol<T>) -> Result<Vec<SandwichRow<T>>> {
    let sp = crate::axioms::all_pairs_min_chain(space);
    let n = space.len();
    let mut rows = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let upper = match f_upper_bound_auto(params, sp.get(i, j), tol) {
                Ok(u) => Some(u),
                Err(Error::Bracket { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(SandwichRow {
                pair: [space.label(i).to_string(), space.label(j).to_string()],
                lower: sp.get(i, j),
                distance: space.d(i, j),
                upper,
            });
        }
    }
    Ok(rows)
}

/// [`f_sandwich`] as a verdict: every bounded pair must satisfy `D <= upper`.
/// Certificates: `pairs`, `unbounded` and `max_ratio` (largest `D/d`).
pub fn check_f_sandwich<T: Scalar>(space: &DistanceSpace<T>, params: &FParams<T>, tol: Tol<T>) -> Result<Verdict<T>> {
    let rows = f_sandwich(space, params, tol)?;
    let mut witness = None;
    let mut unbounded = 0usize;
    let mut max_ratio = T::one();
    for r in &rows {
        max_ratio = max_ratio.max(r.distance / r.lower);
        match r.upper {
            None => unbounded += 1,
            Some(u) if witness.is_none() && !tol.le(r.distance, u) => {
                witness = Some(
                    Witness::new(WitnessKind::FSandwich, "D(x,y) <= f^-1(f(d(x,y)) + alpha)", Cmp::Le, r.distance, u, tol)
                        .at_points(r.pair.iter().cloned())
                        .with_args([params.alpha]),
                );
            }
            Some(_) => {}
        }
    }
    let count = |k: usize| T::from_usize(k).unwrap_or_else(T::max_value);
    Ok(Verdict::from_witness(witness)
        .with_cert("pairs", count(rows.len()))
        .with_cert("unbounded", count(unbounded))
        .with_cert("max_ratio", max_ratio))
}

/// Zero diagonal, symmetry, positivity and the triangle inequality on a
/// matrix, the latter two up to `tol`. Witness: first violation found.
pub fn check_metric_axioms<T: Scalar>(labels: &[String], m: &[Vec<T>], tol: Tol<T>) -> Verdict<T> {
    let n = m.len();
    let label = |i: usize| labels.get(i).cloned().unwrap_or_else(|| format!("p{i}"));
    for i in 0..n {
        if m[i][i] != T::zero() {
            return Verdict::fail(
                Witness::new(WitnessKind::Diagonal, "d(x,x) = 0", Cmp::Eq, m[i][i], T::zero(), Tol::exact())
                    .at_points([label(i), label(i)]),
            );
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if m[i][j] <= T::zero() {
                return Verdict::fail(
                    Witness::new(WitnessKind::Positivity, "d(x,y) > 0", Cmp::Gt, m[i][j], T::zero(), Tol::exact())
                        .at_points([label(i), label(j)]),
                );
            }
            if !tol.eq(m[i][j], m[j][i]) {
                return Verdict::fail(
                    Witness::new(WitnessKind::Symmetry, "d(x,y) = d(y,x)", Cmp::Eq, m[i][j], m[j][i], tol)
                        .at_points([label(i), label(j)]),
                );
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let rhs = m[x][y] + m[y][z];
                if !tol.le(m[x][z], rhs) {
                    return Verdict::fail(
                        Witness::new(WitnessKind::MetricTriangle, "d(x,z) <= d(x,y) + d(y,z)", Cmp::Le, m[x][z], rhs, tol)
                            .at_points([label(x), label(y), label(z)]),
                    );
                }
            }
        }
    }
    Verdict::pass()
}
