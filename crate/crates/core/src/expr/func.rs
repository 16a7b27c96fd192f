use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ast::Expr;
use super::eval::{evaluate, EvalError};
use super::parse::{parse, ParseError};
use crate::scalar::Scalar;

/// One-variable function, e.g. the control function of an F-metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFn {
    expr: Expr,
    variable: String,
    source: String,
}

impl ScalarFn {
    /// Parses a function of `t`.
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Self::parse_in(source, "t")
    }

    pub fn parse_in(source: &str, variable: &str) -> Result<Self, ParseError> {
        let expr = parse(source, &[variable])?;
        Ok(ScalarFn {
            expr,
            variable: variable.to_string(),
            source: source.to_string(),
        })
    }

    pub fn eval<T: Scalar>(&self, t: T) -> Result<T, EvalError> {
        evaluate(&self.expr, &[(self.variable.as_str(), t)])
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for ScalarFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let src = String::deserialize(d)?;
        ScalarFn::parse(&src).map_err(serde::de::Error::custom)
    }
}

/// Two-variable function: a B-action `θ(s,t)` or a distance formula `D(x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryFn {
    expr: Expr,
    variables: (String, String),
    source: String,
}

impl BinaryFn {
    /// Parses an action in `(s, t)`.
    pub fn action(source: &str) -> Result<Self, ParseError> {
        Self::parse_in(source, ("s", "t"))
    }

    /// Parses a distance formula in `(x, y)`.
    pub fn distance(source: &str) -> Result<Self, ParseError> {
        Self::parse_in(source, ("x", "y"))
    }

    pub fn parse_in(source: &str, variables: (&str, &str)) -> Result<Self, ParseError> {
        let expr = parse(source, &[variables.0, variables.1])?;
        Ok(BinaryFn {
            expr,
            variables: (variables.0.to_string(), variables.1.to_string()),
            source: source.to_string(),
        })
    }

    pub fn eval<T: Scalar>(&self, a: T, b: T) -> Result<T, EvalError> {
        evaluate(
            &self.expr,
            &[(self.variables.0.as_str(), a), (self.variables.1.as_str(), b)],
        )
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn variables(&self) -> (&str, &str) {
        (&self.variables.0, &self.variables.1)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for BinaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for BinaryFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

/// Standard exemplars. Their validity is established by the validators.
pub mod presets {
    pub const F_LN: &str = "ln(t)";
    pub const F_LN_PLUS_T: &str = "ln(t)+t";
    pub const F_NEG_RECIPROCAL: &str = "-1/t";
    pub const F_ALL: [&str; 3] = [F_LN, F_LN_PLUS_T, F_NEG_RECIPROCAL];

    pub const THETA_SUM: &str = "s+t";
    pub const THETA_SUM_PRODUCT: &str = "s+t+s*t";
    pub const THETA_MAX: &str = "max(s,t)";
    pub const THETA_ALL: [&str; 3] = [THETA_SUM, THETA_SUM_PRODUCT, THETA_MAX];
}
