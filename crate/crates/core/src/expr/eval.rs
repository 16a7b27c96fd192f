use std::fmt;

use num_traits::Float;

use super::ast::{BinaryOp, Expr, UnaryOp};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    Unbound(String),
    LnDomain,
    SqrtDomain,
    DivisionByZero,
    ZeroToNegativePower,
    NegativeBaseFractionalPower,
    NonFinite,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalErrorKind::Unbound(n) => write!(f, "unbound variable {n}"),
            EvalErrorKind::LnDomain => f.write_str("ln of a non-positive value"),
            EvalErrorKind::SqrtDomain => f.write_str("sqrt of a negative value"),
            EvalErrorKind::DivisionByZero => f.write_str("division by zero"),
            EvalErrorKind::ZeroToNegativePower => f.write_str("zero raised to a negative power"),
            EvalErrorKind::NegativeBaseFractionalPower => {
                f.write_str("negative base raised to a non-integer power")
            }
            EvalErrorKind::NonFinite => f.write_str("non-finite result"),
        }
    }
}

/// Domain error with the offending sub-expression and the bindings in force.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subexpr: String,
    pub bindings: Vec<(String, f64)>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain error: {} in `{}`", self.kind, self.subexpr)?;
        if !self.bindings.is_empty() {
            let b: Vec<String> = self.bindings.iter().map(|(n, v)| format!("{n}={v}")).collect();
            write!(f, " at {}", b.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for EvalError {}

struct Fault<'e> {
    kind: EvalErrorKind,
    at: &'e Expr,
}

/// Evaluates `expr` under `bindings`. Every domain violation is an error;
/// the result is always finite.
pub fn evaluate<T: Scalar>(expr: &Expr, bindings: &[(&str, T)]) -> Result<T, EvalError> {
    eval_node(expr, bindings).map_err(|fault| EvalError {
        kind: fault.kind,
        subexpr: fault.at.to_string(),
        bindings: bindings.iter().map(|(n, v)| (n.to_string(), v.as_f64())).collect(),
    })
}

fn finite<'e, T: Scalar>(v: T, at: &'e Expr) -> Result<T, Fault<'e>> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Fault {
            kind: EvalErrorKind::NonFinite,
            at,
        })
    }
}

fn eval_node<'e, T: Scalar>(expr: &'e Expr, bindings: &[(&str, T)]) -> Result<T, Fault<'e>> {
    let fault = |kind| Fault { kind, at: expr };
    match expr {
        Expr::Const(v) => T::from_f64(*v)
            .filter(|x| x.is_finite())
            .ok_or_else(|| fault(EvalErrorKind::NonFinite)),
        Expr::Var(name) => bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| fault(EvalErrorKind::Unbound(name.clone()))),
        Expr::Unary(op, child) => {
            let x = eval_node(child, bindings)?;
            let v = match op {
                UnaryOp::Neg => -x,
                UnaryOp::Abs => x.abs(),
                UnaryOp::Exp => x.exp(),
                UnaryOp::Ln => {
                    if x <= T::zero() {
                        return Err(fault(EvalErrorKind::LnDomain));
                    }
                    x.ln()
                }
                UnaryOp::Sqrt => {
                    if x < T::zero() {
                        return Err(fault(EvalErrorKind::SqrtDomain));
                    }
                    x.sqrt()
                }
            };
            finite(v, expr)
        }
        Expr::Binary(op, l, r) => {
            let a = eval_node(l, bindings)?;
            let b = eval_node(r, bindings)?;
            let v = match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == T::zero() {
                        return Err(fault(EvalErrorKind::DivisionByZero));
                    }
                    a / b
                }
                BinaryOp::Pow => {
                    if a == T::zero() && b < T::zero() {
                        return Err(fault(EvalErrorKind::ZeroToNegativePower));
                    }
                    if a < T::zero() && b.fract() != T::zero() {
                        return Err(fault(EvalErrorKind::NegativeBaseFractionalPower));
                    }
                    a.powf(b)
                }
                BinaryOp::Min => Float::min(a, b),
                BinaryOp::Max => Float::max(a, b),
            };
            finite(v, expr)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;

    #[test]
    fn ln_at_one_is_zero() {
        let e = parse("ln(t)", &["t"]).unwrap();
        assert_eq!(evaluate(&e, &[("t", 1.0_f64)]).unwrap(), 0.0);
    }

    #[test]
    fn product_action_value() {
        let e = parse("s+t+s*t", &["s", "t"]).unwrap();
        assert_eq!(evaluate(&e, &[("s", 2.0_f64), ("t", 3.0)]).unwrap(), 11.0);
    }

    #[test]
    fn ln_at_zero_names_subexpression_and_binding() {
        let e = parse("ln(t)", &["t"]).unwrap();
        let err = evaluate(&e, &[("t", 0.0_f64)]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::LnDomain);
        assert_eq!(err.subexpr, "ln(t)");
        assert_eq!(err.bindings, vec![("t".to_string(), 0.0)]);
    }

    #[test]
    fn overflow_is_reported_not_returned() {
        let e = parse("exp(t)", &["t"]).unwrap();
        let err = evaluate(&e, &[("t", 1000.0_f64)]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::NonFinite);
    }

    #[test]
    fn f32_evaluation() {
        let e = parse("2^3^2", &[]).unwrap();
        assert_eq!(evaluate::<f32>(&e, &[]).unwrap(), 512.0);
    }
}
