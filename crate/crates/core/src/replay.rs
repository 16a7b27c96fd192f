//! Re-evaluates a stored witness against its source.

use crate::axioms::all_pairs_min_chain;
use crate::axioms::theta::theta_fold;
use crate::metrize::f_upper_bound_auto;
use crate::error::{Error, Result};
use crate::expr::{BinaryFn, ScalarFn};
use crate::params::{FParams, ThetaParams};
use crate::regularity::{iii_c_radius, locally_regular_phi, verify_iii_c};
use crate::scalar::{close_rel, Scalar, Tol};
use crate::space::{DistanceSpace, SampledSequence};
use crate::verdict::{Witness, WitnessKind};

/// Relative agreement required between stored and recomputed sides.
pub const REPLAY_REL: f64 = 1e-12;

/// Whatever a witness may refer to. Only the parts its kind needs must be set.
#[derive(Debug, Clone, Copy)]
pub struct ReplayContext<'a, T> {
    pub labels: &'a [String],
    pub matrix: &'a [Vec<T>],
    pub space: Option<&'a DistanceSpace<T>>,
    pub f: Option<&'a ScalarFn>,
    pub theta: Option<&'a BinaryFn>,
    pub sequence: Option<&'a SampledSequence<T>>,
}

impl<'a, T: Scalar> ReplayContext<'a, T> {
    pub fn empty() -> Self {
        ReplayContext {
            labels: &[],
            matrix: &[],
            space: None,
            f: None,
            theta: None,
            sequence: None,
        }
    }

    pub fn space(space: &'a DistanceSpace<T>) -> Self {
        ReplayContext {
            labels: space.labels(),
            matrix: space.matrix(),
            space: Some(space),
            ..Self::empty()
        }
    }

    /// A raw (possibly invalid) matrix, for distance-axiom witnesses.
    pub fn matrix(labels: &'a [String], matrix: &'a [Vec<T>]) -> Self {
        ReplayContext {
            labels,
            matrix,
            ..Self::empty()
        }
    }

    pub fn with_f(mut self, f: &'a ScalarFn) -> Self {
        self.f = Some(f);
        self
    }

    pub fn with_theta(mut self, theta: &'a BinaryFn) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_sequence(mut self, seq: &'a SampledSequence<T>) -> Self {
        self.sequence = Some(seq);
        self
    }

    fn idx(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn d(&self, a: &str, b: &str) -> Result<T> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        self.matrix
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .ok_or_else(|| Error::Dimension(format!("no matrix entry for ({a},{b})")))
    }

    fn f(&self) -> Result<&'a ScalarFn> {
        self.f.ok_or_else(|| missing("f"))
    }

    fn theta(&self) -> Result<&'a BinaryFn> {
        self.theta.ok_or_else(|| missing("theta"))
    }

    fn space_ref(&self) -> Result<&'a DistanceSpace<T>> {
        self.space.ok_or_else(|| missing("space"))
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("replay needs {what}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayOutcome<T> {
    pub lhs: T,
    pub rhs: T,
    /// Recomputed sides agree with the stored ones within [`REPLAY_REL`].
    pub reproduced: bool,
    /// The recomputed sides violate the stored comparison, and any premise holds.
    pub violated: bool,
}

impl<T> ReplayOutcome<T> {
    pub fn confirmed(&self) -> bool {
        self.reproduced && self.violated
    }
}

fn points<T>(w: &Witness<T>, n: usize) -> Result<&[String]> {
    if w.points.len() < n {
        return Err(Error::InvalidParameter(format!("{} witness needs {n} points", w.kind)));
    }
    Ok(&w.points)
}

fn args<T: Scalar>(w: &Witness<T>, n: usize) -> Result<&[T]> {
    if w.args.len() < n {
        return Err(Error::InvalidParameter(format!("{} witness needs {n} arguments", w.kind)));
    }
    Ok(&w.args)
}

/// Recomputes the witness's two sides from `ctx` and re-judges the comparison
/// at the witness's stored tolerance.
pub fn replay<T: Scalar>(w: &Witness<T>, ctx: &ReplayContext<'_, T>) -> Result<ReplayOutcome<T>> {
    use WitnessKind::*;
    let mut premise = true;
    let (lhs, rhs) = match w.kind {
        Diagonal => {
            let p = points(w, 1)?;
            (ctx.d(&p[0], &p[0])?, T::zero())
        }
        Symmetry => {
            let p = points(w, 2)?;
            (ctx.d(&p[0], &p[1])?, ctx.d(&p[1], &p[0])?)
        }
        Positivity => {
            let p = points(w, 2)?;
            (ctx.d(&p[0], &p[1])?, T::zero())
        }
        BTriangle => {
            let p = points(w, 3)?;
            let k = args(w, 1)?[0];
            (ctx.d(&p[0], &p[2])?, k * (ctx.d(&p[0], &p[1])? + ctx.d(&p[1], &p[2])?))
        }
        FChain => {
            let p = points(w, 2)?;
            let alpha = args(w, 1)?[0];
            let f = ctx.f()?;
            let mut sum = T::zero();
            for e in w.chain.windows(2) {
                sum = sum + ctx.d(&e[0], &e[1])?;
            }
            premise = w.chain.first() == Some(&p[0]) && w.chain.last() == Some(&p[1]);
            (f.eval(ctx.d(&p[0], &p[1])?)?, f.eval(sum)? + alpha)
        }
        F1Monotone => {
            let a = args(w, 2)?;
            let f = ctx.f()?;
            premise = a[0] < a[1];
            (f.eval(a[0])?, f.eval(a[1])?)
        }
        F2Decreasing => {
            let a = args(w, 2)?;
            let f = ctx.f()?;
            (f.eval(a[1])?, f.eval(a[0])?)
        }
        F2Threshold => {
            let a = args(w, 2)?;
            (ctx.f()?.eval(a[0])?, a[1])
        }
        BActionOrigin => (ctx.theta()?.eval(T::zero(), T::zero())?, T::zero()),
        BActionSymmetry => {
            let a = args(w, 2)?;
            let th = ctx.theta()?;
            (th.eval(a[0], a[1])?, th.eval(a[1], a[0])?)
        }
        BActionMonotone => {
            let a = args(w, 4)?;
            let th = ctx.theta()?;
            premise = (a[0] <= a[2] && a[1] < a[3]) || (a[0] < a[2] && a[1] <= a[3]);
            (th.eval(a[0], a[1])?, th.eval(a[2], a[3])?)
        }
        BActionSolvable => {
            let a = args(w, 3)?;
            (ctx.theta()?.eval(a[2], a[1])?, a[0])
        }
        BActionBound => {
            let a = args(w, 1)?;
            (ctx.theta()?.eval(a[0], T::zero())?, a[0])
        }
        ThetaTriangle => {
            let p = points(w, 3)?;
            let th = ctx.theta()?;
            (ctx.d(&p[0], &p[2])?, th.eval(ctx.d(&p[0], &p[1])?, ctx.d(&p[1], &p[2])?)?)
        }
        ChainBound => {
            let p = points(w, 2)?;
            let edges = p
                .windows(2)
                .map(|e| ctx.d(&e[0], &e[1]))
                .collect::<Result<Vec<T>>>()?;
            let params = ThetaParams::new(ctx.theta()?.clone());
            (ctx.d(&p[0], &p[p.len() - 1])?, theta_fold(&params, &edges)?)
        }
        MetricTriangle => {
            let p = points(w, 3)?;
            (ctx.d(&p[0], &p[2])?, ctx.d(&p[0], &p[1])? + ctx.d(&p[1], &p[2])?)
        }
        FSandwich => {
            let p = points(w, 2)?;
            let alpha = args(w, 1)?[0];
            let space = ctx.space_ref()?;
            let (i, j) = (space.index_of(&p[0])?, space.index_of(&p[1])?);
            let params = FParams::new(ctx.f()?.clone(), alpha)?;
            let sp = all_pairs_min_chain(space).get(i, j);
            (space.d(i, j), f_upper_bound_auto(&params, sp, Tol::new(w.tol))?)
        }
        IiiA => {
            let p = points(w, 3)?;
            let a = args(w, 2)?;
            let (phi, eps) = (a[0], a[1]);
            premise = ctx.d(&p[0], &p[1])? < phi && ctx.d(&p[1], &p[2])? < phi;
            (ctx.d(&p[0], &p[2])?, eps)
        }
        IiiB => {
            let a = args(w, 2)?;
            let seq = ctx.sequence.ok_or_else(|| missing("sequence"))?;
            let n = a[0].to_usize().filter(|&n| n >= 1 && n <= seq.len()).ok_or_else(|| {
                Error::InvalidParameter(format!("index {} outside trace {}", a[0], seq.name()))
            })?;
            (seq.values()[n - 1], a[1])
        }
        IiiC => {
            let p = points(w, 3)?;
            let a = args(w, 2)?;
            premise = ctx.d(&p[0], &p[1])? >= a[0];
            (ctx.d(&p[0], &p[2])? + ctx.d(&p[1], &p[2])?, a[1])
        }
        CrossCheck => {
            let p = points(w, 1)?;
            let eps = args(w, 1)?[0];
            let space = ctx.space_ref()?;
            let tol = Tol::new(w.tol);
            let a_exists = locally_regular_phi(space, &p[0], eps, tol)?.is_some();
            let c_exists = match iii_c_radius(space, &p[0], eps)? {
                None => true,
                Some(r) => r > T::zero() && verify_iii_c(space, &p[0], eps, r, tol)?.pass,
            };
            let flag = |b: bool| if b { T::one() } else { T::zero() };
            (flag(a_exists), flag(c_exists))
        }
    };
    let rel = T::lit(REPLAY_REL);
    let reproduced = close_rel(lhs, w.lhs, rel) && close_rel(rhs, w.rhs, rel);
    let violated = premise && !w.cmp.holds(Tol::new(w.tol), lhs, rhs);
    Ok(ReplayOutcome {
        lhs,
        rhs,
        reproduced,
        violated,
    })
}
