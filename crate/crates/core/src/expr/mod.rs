//! Arithmetic expression language for control functions, B-actions and
//! analytic distance formulas.

mod ast;
mod eval;
mod func;
mod parse;

pub use ast::{pretty_print, BinaryOp, Expr, UnaryOp};
pub use eval::{evaluate, EvalError, EvalErrorKind};
pub use func::{presets, BinaryFn, ScalarFn};
pub use parse::{parse, ParseError, ParseErrorKind};
