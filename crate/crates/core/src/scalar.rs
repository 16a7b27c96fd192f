//! Scalar abstraction and tolerance-aware comparisons.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Floating scalar the workbench computes in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Relative tolerance used when none is configured.
    fn default_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_tol() -> Self {
        1e-5
    }
}

/// Relative tolerance. A comparison against `b` uses the slack
/// `rel * max(1, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tol<T> {
    pub rel: T,
}

impl<T: Scalar> Default for Tol<T> {
    fn default() -> Self {
        Tol {
            rel: T::default_tol(),
        }
    }
}

impl<T: Scalar> Tol<T> {
    pub fn new(rel: T) -> Self {
        Tol { rel }
    }

    /// Exact comparisons everywhere.
    pub fn exact() -> Self {
        Tol { rel: T::zero() }
    }

    #[inline]
    pub fn slack(&self, b: T) -> T {
        self.rel * b.abs().max(T::one())
    }

    /// `a < b`, strict up to tolerance: `a < b - slack(b)`.
    #[inline]
    pub fn lt(&self, a: T, b: T) -> bool {
        a < b - self.slack(b)
    }

    /// `a <= b`, ties within tolerance resolve to true.
    #[inline]
    pub fn le(&self, a: T, b: T) -> bool {
        a <= b + self.slack(b)
    }

    /// `a >= b`, ties within tolerance resolve to true.
    #[inline]
    pub fn ge(&self, a: T, b: T) -> bool {
        a >= b - self.slack(b)
    }

    /// `a > b`, strict up to tolerance.
    #[inline]
    pub fn gt(&self, a: T, b: T) -> bool {
        a > b + self.slack(b)
    }

    #[inline]
    pub fn eq(&self, a: T, b: T) -> bool {
        (a - b).abs() <= self.slack(b)
    }
}

/// Relative agreement used for witness replay: `|a - b| <= rel * max(1, |a|, |b|)`.
pub fn close_rel<T: Scalar>(a: T, b: T, rel: T) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs()).max(T::one());
    (a - b).abs() <= rel * scale
}
