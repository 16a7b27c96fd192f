use crate::error::{Error, Result};
use crate::params::{BParams, FParams, ThetaParams};
use crate::scalar::{Scalar, Tol};

use super::{Condition, Method, RegularityCertificate};

const NOT_FOUND: &str = "F2 certificate not found at this resolution";

/// Grid for function-relative searches. The largest qualifying grid value is
/// refined by bisection toward the first failing one until the bracket is
/// narrower than `resolution` relative to its upper end.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSearch<T> {
    pub grid: Vec<T>,
    pub resolution: T,
}

impl<T: Scalar> Default for LevelSearch<T> {
    /// `2^-20, ..., 2^10` with relative resolution `2^-20`.
    fn default() -> Self {
        LevelSearch {
            grid: (-20..=10).map(|e| T::lit(2.0).powi(e)).collect(),
            resolution: T::lit(2.0).powi(-20),
        }
    }
}

impl<T: Scalar> LevelSearch<T> {
    pub fn new(mut grid: Vec<T>, resolution: T) -> Result<Self> {
        if grid.is_empty() || grid.iter().any(|&g| !(g > T::zero() && g.is_finite())) {
            return Err(Error::InvalidParameter("search grid must be nonempty and positive".into()));
        }
        if !(resolution > T::zero()) {
            return Err(Error::InvalidParameter("search resolution must be positive".into()));
        }
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        grid.dedup();
        Ok(LevelSearch { grid, resolution })
    }

    /// Largest `x` such that `ok` holds at every grid value `<= x` and at `x`,
    /// with the final bracket width. `ok` is assumed to hold on an initial
    /// segment (monotone predicate).
    fn largest<F>(&self, mut ok: F) -> Result<(T, T)>
    where
        F: FnMut(T) -> Result<bool>,
    {
        let mut last: Option<usize> = None;
        for (i, &g) in self.grid.iter().enumerate() {
            if !ok(g)? {
                break;
            }
            last = Some(i);
        }
        let i = last.ok_or_else(|| {
            Error::CertificateNotFound(format!("{NOT_FOUND} (smallest grid value {} fails)", self.grid[0]))
        })?;
        if i + 1 == self.grid.len() {
            return Ok((self.grid[i], T::zero()));
        }
        let (mut lo, mut hi) = (self.grid[i], self.grid[i + 1]);
        while hi - lo > self.resolution * hi {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo, hi - lo))
    }
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero() && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `δ` with `f(t) < f(level_at) - α` for all searched `t <= δ`.
fn f_level_delta<T: Scalar>(params: &FParams<T>, level_at: T, search: &LevelSearch<T>, tol: Tol<T>) -> Result<(T, T, T)> {
    let level = params.f.eval(level_at)? - params.alpha;
    let f = &params.f;
    let (delta, width) = search.largest(|t| Ok(tol.lt(f.eval(t)?, level)))?;
    Ok((delta, width, level))
}

/// `φ(eps) = δ/2` where `f(t) < f(eps) - α` for every searched `t <= δ`.
/// The margin is `f(eps) - α - f(2φ)`; extras record `delta`.
pub fn phi_from_f<T: Scalar>(
    params: &FParams<T>,
    eps: T,
    search: &LevelSearch<T>,
    tol: Tol<T>,
) -> Result<RegularityCertificate<T>> {
    positive("eps", eps)?;
    let (delta, width, level) = f_level_delta(params, eps, search, tol)?;
    let phi = delta / T::lit(2.0);
    let margin = level - params.f.eval(phi + phi)?;
    Ok(RegularityCertificate::new(Condition::Uniform, eps, phi, Method::PaperFormula)
        .with_margin(margin)
        .with_resolution(width)
        .with_extra("delta", delta))
}

/// `r` with `f(t) < f(k) - α` for every searched `t <= r`.
pub fn r_from_f<T: Scalar>(params: &FParams<T>, k: T, search: &LevelSearch<T>, tol: Tol<T>) -> Result<RegularityCertificate<T>> {
    positive("k", k)?;
    let (r, width, level) = f_level_delta(params, k, search, tol)?;
    let margin = level - params.f.eval(r)?;
    Ok(RegularityCertificate::new(Condition::IiiC, k, r, Method::PaperFormula)
        .with_margin(margin)
        .with_resolution(width))
}

/// `r = t / K`.
pub fn r_for_b<T: Scalar>(params: BParams<T>, t: T) -> Result<RegularityCertificate<T>> {
    positive("t", t)?;
    Ok(RegularityCertificate::new(Condition::IiiC, t, t / params.k, Method::PaperFormula))
}

/// `δ` such that `θ(s,t) < k` for all searched `s, t` in `[0, δ]` (0
/// included); the certified value is `δ/√2`, with `delta` in the extras.
pub fn delta_theta_at_origin<T: Scalar>(
    theta: &ThetaParams,
    k: T,
    search: &LevelSearch<T>,
    tol: Tol<T>,
) -> Result<RegularityCertificate<T>> {
    positive("k", k)?;
    let th = &theta.theta;
    let sample_max = |x: T| -> Result<T> {
        let mut pts: Vec<T> = vec![T::zero()];
        pts.extend(search.grid.iter().copied().take_while(|&g| g < x));
        pts.push(x);
        let mut m = T::zero();
        for &s in &pts {
            for &t in &pts {
                m = m.max(th.eval(s, t)?);
            }
        }
        Ok(m)
    };
    let (delta, width) = search.largest(|x| Ok(tol.lt(sample_max(x)?, k)))?;
    let value = delta / T::lit(2.0).sqrt();
    Ok(RegularityCertificate::new(Condition::IiiC, k, value, Method::PaperFormula)
        .with_margin(k - sample_max(delta)?)
        .with_resolution(width)
        .with_extra("delta", delta))
}
