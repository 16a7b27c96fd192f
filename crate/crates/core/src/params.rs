//! Structure-specific parameters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{BinaryFn, ScalarFn};
use crate::scalar::Scalar;

/// Coefficient of the relaxed triangle inequality `D(x,z) <= K [D(x,y) + D(y,z)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BParams<T> {
    #[serde(rename = "K")]
    pub k: T,
}

impl<T: Scalar> BParams<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k.is_finite() && k > T::zero()) {
            return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
        }
        Ok(BParams { k })
    }
}

/// Control pair `(f, alpha)` of an F-metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FParams<T> {
    pub f: ScalarFn,
    pub alpha: T,
}

impl<T: Scalar> FParams<T> {
    pub fn new(f: ScalarFn, alpha: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= T::zero()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(FParams { f, alpha })
    }

    /// Parses `f` as a function of `t`.
    pub fn parse(f: &str, alpha: T) -> Result<Self> {
        Self::new(ScalarFn::parse(f)?, alpha)
    }
}

/// B-action `θ(s, t)` of a θ-metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaParams {
    pub theta: BinaryFn,
}

impl ThetaParams {
    pub fn new(theta: BinaryFn) -> Self {
        ThetaParams { theta }
    }

    /// Parses `θ` as a function of `(s, t)`.
    pub fn parse(theta: &str) -> Result<Self> {
        Ok(ThetaParams {
            theta: BinaryFn::action(theta)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "structure", rename_all = "lowercase")]
pub enum StructureParams<T> {
    B(BParams<T>),
    F(FParams<T>),
    Theta(ThetaParams),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_coefficients() {
        assert!(BParams::new(0.0_f64).is_err());
        assert!(BParams::new(f64::INFINITY).is_err());
        assert!(BParams::new(0.5_f64).is_ok());
        assert!(FParams::parse("ln(t)", -1.0_f64).is_err());
        assert!(FParams::parse("ln(s)", 0.0_f64).is_err());
    }
}
