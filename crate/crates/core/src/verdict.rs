//! Pass/fail outcomes, witnesses and certificate maps.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::{Scalar, Tol};

/// Which axiom or condition a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Diagonal,
    Symmetry,
    Positivity,
    BTriangle,
    FChain,
    F1Monotone,
    F2Decreasing,
    F2Threshold,
    BActionOrigin,
    BActionSymmetry,
    BActionMonotone,
    BActionSolvable,
    BActionBound,
    ThetaTriangle,
    ChainBound,
    MetricTriangle,
    FSandwich,
    IiiA,
    IiiB,
    IiiC,
    CrossCheck,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = kind_name(*self);
        f.write_str(s)
    }
}

fn kind_name(kind: WitnessKind) -> &'static str {
    use WitnessKind::*;
    match kind {
        Diagonal => "diagonal",
        Symmetry => "symmetry",
        Positivity => "positivity",
        BTriangle => "b_triangle",
        FChain => "f_chain",
        F1Monotone => "f1_monotone",
        F2Decreasing => "f2_decreasing",
        F2Threshold => "f2_threshold",
        BActionOrigin => "b_action_origin",
        BActionSymmetry => "b_action_symmetry",
        BActionMonotone => "b_action_monotone",
        BActionSolvable => "b_action_solvable",
        BActionBound => "b_action_bound",
        ThetaTriangle => "theta_triangle",
        ChainBound => "chain_bound",
        MetricTriangle => "metric_triangle",
        FSandwich => "f_sandwich",
        IiiA => "iii_a",
        IiiB => "iii_b",
        IiiC => "iii_c",
        CrossCheck => "cross_check",
    }
}

/// The comparison `lhs <cmp> rhs` that was expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

impl Cmp {
    pub fn holds<T: Scalar>(self, tol: Tol<T>, lhs: T, rhs: T) -> bool {
        match self {
            Cmp::Le => tol.le(lhs, rhs),
            Cmp::Lt => tol.lt(lhs, rhs),
            Cmp::Ge => tol.ge(lhs, rhs),
            Cmp::Gt => tol.gt(lhs, rhs),
            Cmp::Eq => tol.eq(lhs, rhs),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
            Cmp::Eq => "=",
        }
    }
}

/// A concrete violation: the inequality `relation` (machine form `lhs cmp rhs`)
/// fails at `points` (labels) or `args` (numeric arguments).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct Witness<T> {
    pub kind: WitnessKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<T>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<String>,
    pub lhs: T,
    pub rhs: T,
    pub relation: String,
    pub cmp: Cmp,
    /// Relative tolerance the comparison was judged with.
    pub tol: T,
}

impl<T: Scalar> Witness<T> {
    pub fn new(kind: WitnessKind, relation: impl Into<String>, cmp: Cmp, lhs: T, rhs: T, tol: Tol<T>) -> Self {
        Witness {
            kind,
            points: Vec::new(),
            args: Vec::new(),
            chain: Vec::new(),
            lhs,
            rhs,
            relation: relation.into(),
            cmp,
            tol: tol.rel,
        }
    }

    pub fn at_points<S: Into<String>>(mut self, points: impl IntoIterator<Item = S>) -> Self {
        self.points = points.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_args(mut self, args: impl IntoIterator<Item = T>) -> Self {
        self.args = args.into_iter().collect();
        self
    }

    pub fn with_chain<S: Into<String>>(mut self, chain: impl IntoIterator<Item = S>) -> Self {
        self.chain = chain.into_iter().map(Into::into).collect();
        self
    }

    /// True when the stored `lhs`/`rhs` really violate the stored comparison.
    pub fn is_violation(&self) -> bool {
        !self.cmp.holds(Tol::new(self.tol), self.lhs, self.rhs)
    }

    pub fn to_f64(&self) -> Witness<f64> {
        Witness {
            kind: self.kind,
            points: self.points.clone(),
            args: self.args.iter().map(|a| a.as_f64()).collect(),
            chain: self.chain.clone(),
            lhs: self.lhs.as_f64(),
            rhs: self.rhs.as_f64(),
            relation: self.relation.clone(),
            cmp: self.cmp,
            tol: self.tol.as_f64(),
        }
    }
}

impl<T: Scalar> fmt::Display for Witness<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated", self.kind)?;
        if !self.points.is_empty() {
            write!(f, " at ({})", self.points.join(","))?;
        }
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, " at args ({})", args.join(","))?;
        }
        write!(
            f,
            ": {} [lhs {} {} rhs {} fails]",
            self.relation,
            self.lhs,
            self.cmp.symbol(),
            self.rhs
        )
    }
}

/// Outcome of a check. `pass == witness.is_none()` always holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict<T> {
    pub pass: bool,
    pub witness: Option<Witness<T>>,
    pub certificates: BTreeMap<String, T>,
}

impl<T: Scalar> Verdict<T> {
    pub fn pass() -> Self {
        Verdict {
            pass: true,
            witness: None,
            certificates: BTreeMap::new(),
        }
    }

    pub fn fail(witness: Witness<T>) -> Self {
        Verdict {
            pass: false,
            witness: Some(witness),
            certificates: BTreeMap::new(),
        }
    }

    pub fn from_witness(witness: Option<Witness<T>>) -> Self {
        match witness {
            Some(w) => Self::fail(w),
            None => Self::pass(),
        }
    }

    pub fn with_cert(mut self, name: &str, value: T) -> Self {
        self.certificates.insert(name.to_string(), value);
        self
    }

    pub fn cert(&self, name: &str) -> Option<T> {
        self.certificates.get(name).copied()
    }

    pub fn is_heuristic(&self) -> bool {
        self.certificates.get("heuristic").is_some_and(|v| *v > T::zero())
    }

    pub fn to_f64(&self) -> Verdict<f64> {
        Verdict {
            pass: self.pass,
            witness: self.witness.as_ref().map(Witness::to_f64),
            certificates: self.certificates.iter().map(|(k, v)| (k.clone(), v.as_f64())).collect(),
        }
    }
}
