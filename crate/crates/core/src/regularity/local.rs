use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tol};
use crate::space::DistanceSpace;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

use super::{Condition, Method, RegularityCertificate};

const IIIA_RELATION: &str = "d(x,y) < phi and d(y,z) < phi imply d(x,z) < eps";
const IIIC_RELATION: &str = "d(a,b) >= k implies d(a,c) + d(b,c) >= r";

/// Distinct positive distances plus midpoints of consecutive ones, ascending.
pub fn candidate_scales<T: Scalar>(space: &DistanceSpace<T>) -> Vec<T> {
    let vals = space.distinct_distances();
    let mut out = Vec::with_capacity(vals.len() * 2);
    for (i, &v) in vals.iter().enumerate() {
        if i > 0 {
            out.push((vals[i - 1] + v) / T::lit(2.0));
        }
        out.push(v);
    }
    out
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// Largest `φ` allowed at anchor `x`: every pair `(y,z)` with a failing
/// conclusion must be excluded by a premise, so `φ <= max(d(x,y), d(y,z))`.
fn phi_bound<T: Scalar>(space: &DistanceSpace<T>, x: usize, eps: T, tol: Tol<T>) -> Option<T> {
    let n = space.len();
    let mut bound: Option<T> = None;
    for y in 0..n {
        for z in 0..n {
            if !tol.lt(space.d(x, z), eps) {
                let b = space.d(x, y).max(space.d(y, z));
                bound = Some(bound.map_or(b, |v| v.min(b)));
            }
        }
    }
    bound
}

/// Largest candidate not above `bound`, with the gap to the next candidate.
fn pick<T: Scalar>(candidates: &[T], bound: Option<T>) -> Option<(T, T)> {
    let i = candidates.iter().rposition(|&c| bound.is_none_or(|b| c <= b))?;
    let gap = candidates.get(i + 1).map_or(T::zero(), |&next| next - candidates[i]);
    Some((candidates[i], gap))
}

fn candidates_or_eps<T: Scalar>(space: &DistanceSpace<T>, eps: T) -> Vec<T> {
    let c = candidate_scales(space);
    if c.is_empty() {
        vec![eps]
    } else {
        c
    }
}

/// Largest slack `eps - d(x,z)` left by the premises at `φ`.
fn iii_a_margin<T: Scalar>(space: &DistanceSpace<T>, anchors: &[usize], phi: T, eps: T) -> T {
    let mut worst = T::zero();
    for &x in anchors {
        for y in 0..space.len() {
            if space.d(x, y) >= phi {
                continue;
            }
            for z in 0..space.len() {
                if space.d(y, z) < phi {
                    worst = worst.max(space.d(x, z));
                }
            }
        }
    }
    eps - worst
}

/// Largest `φ` from [`candidate_scales`] such that `d(a,b) < φ` and
/// `d(b,c) < φ` imply `d(a,c) < eps` (premises exact, conclusion strict up to
/// tolerance). A single-point space uses `eps` as its only candidate.
pub fn locally_regular_phi<T: Scalar>(
    space: &DistanceSpace<T>,
    anchor: &str,
    eps: T,
    tol: Tol<T>,
) -> Result<Option<RegularityCertificate<T>>> {
    check_eps(eps)?;
    let a = space.index_of(anchor)?;
    let candidates = candidates_or_eps(space, eps);
    Ok(pick(&candidates, phi_bound(space, a, eps, tol)).map(|(phi, gap)| {
        RegularityCertificate::new(Condition::IiiA, eps, phi, Method::GridSearch)
            .with_anchor(anchor)
            .with_margin(iii_a_margin(space, &[a], phi, eps))
            .with_resolution(gap)
    }))
}

/// The (iii-A) search quantified over every anchor.
pub fn uniform_phi<T: Scalar>(space: &DistanceSpace<T>, eps: T, tol: Tol<T>) -> Result<Option<RegularityCertificate<T>>> {
    check_eps(eps)?;
    let candidates = candidates_or_eps(space, eps);
    let bound = (0..space.len())
        .filter_map(|x| phi_bound(space, x, eps, tol))
        .reduce(|a, b| a.min(b));
    let all: Vec<usize> = (0..space.len()).collect();
    Ok(pick(&candidates, bound).map(|(phi, gap)| {
        RegularityCertificate::new(Condition::Uniform, eps, phi, Method::GridSearch)
            .with_margin(iii_a_margin(space, &all, phi, eps))
            .with_resolution(gap)
    }))
}

/// Exhaustive replay of the (iii-A) implication at `anchor`, or at every point
/// when `anchor` is `None`.
pub fn replay_iii_a<T: Scalar>(
    space: &DistanceSpace<T>,
    anchor: Option<&str>,
    phi: T,
    eps: T,
    tol: Tol<T>,
) -> Result<Verdict<T>> {
    let anchors: Vec<usize> = match anchor {
        Some(a) => vec![space.index_of(a)?],
        None => (0..space.len()).collect(),
    };
    let n = space.len();
    for &x in &anchors {
        for y in 0..n {
            for z in 0..n {
                if space.d(x, y) < phi && space.d(y, z) < phi && !tol.lt(space.d(x, z), eps) {
                    let w = Witness::new(WitnessKind::IiiA, IIIA_RELATION, Cmp::Lt, space.d(x, z), eps, tol)
                        .at_points([space.label(x), space.label(y), space.label(z)])
                        .with_args([phi, eps]);
                    return Ok(Verdict::fail(w));
                }
            }
        }
    }
    Ok(Verdict::pass().with_cert("phi", phi))
}

/// For every `b` with `d(a,b) >= k` (exact) and every `c`:
/// `d(a,c) + d(b,c) >= r` up to tolerance. Witness is the first violating
/// `(b,c)`; vacuous when no `b` qualifies.
pub fn verify_iii_c<T: Scalar>(space: &DistanceSpace<T>, anchor: &str, k: T, r: T, tol: Tol<T>) -> Result<Verdict<T>> {
    let a = space.index_of(anchor)?;
    let n = space.len();
    let mut min_sum: Option<T> = None;
    for b in 0..n {
        if space.d(a, b) < k {
            continue;
        }
        for c in 0..n {
            let sum = space.d(a, c) + space.d(b, c);
            if !tol.ge(sum, r) {
                let w = Witness::new(WitnessKind::IiiC, IIIC_RELATION, Cmp::Ge, sum, r, tol)
                    .at_points([space.label(a), space.label(b), space.label(c)])
                    .with_args([k, r]);
                return Ok(Verdict::fail(w));
            }
            min_sum = Some(min_sum.map_or(sum, |m| m.min(sum)));
        }
    }
    let v = Verdict::pass().with_cert("r", r);
    Ok(match min_sum {
        Some(m) => v.with_cert("margin", m - r),
        None => v.with_cert("vacuous", T::one()),
    })
}

/// Largest `r` passing [`verify_iii_c`] at `(anchor, k)`: the minimum of
/// `d(a,c) + d(b,c)` over qualifying `b`. `None` when no `b` qualifies.
pub fn iii_c_radius<T: Scalar>(space: &DistanceSpace<T>, anchor: &str, k: T) -> Result<Option<T>> {
    let a = space.index_of(anchor)?;
    let n = space.len();
    let mut best: Option<T> = None;
    for b in (0..n).filter(|&b| space.d(a, b) >= k) {
        for c in 0..n {
            let sum = space.d(a, c) + space.d(b, c);
            best = Some(best.map_or(sum, |m| m.min(sum)));
        }
    }
    Ok(best)
}

/// Compares, for each `eps` and anchor, whether an (iii-A) certificate exists
/// with whether a verified (iii-C) certificate exists at `k = eps`.
/// An anchor with no qualifying `b` counts as a (vacuous) (iii-C) certificate.
pub fn cross_check_conditions<T: Scalar>(space: &DistanceSpace<T>, eps_grid: &[T], tol: Tol<T>) -> Result<Verdict<T>> {
    let mut compared = 0usize;
    for &eps in eps_grid {
        check_eps(eps)?;
        for a in space.labels() {
            compared += 1;
            let a_exists = locally_regular_phi(space, a, eps, tol)?.is_some();
            let c_exists = match iii_c_radius(space, a, eps)? {
                None => true,
                Some(r) => r > T::zero() && verify_iii_c(space, a, eps, r, tol)?.pass,
            };
            if a_exists != c_exists {
                let flag = |b: bool| if b { T::one() } else { T::zero() };
                let w = Witness::new(
                    WitnessKind::CrossCheck,
                    "iii-A certificate exists iff iii-C certificate exists",
                    Cmp::Eq,
                    flag(a_exists),
                    flag(c_exists),
                    tol,
                )
                .at_points([a.as_str()])
                .with_args([eps]);
                return Ok(Verdict::fail(w));
            }
        }
    }
    Ok(Verdict::pass().with_cert("compared", T::from_usize(compared).unwrap_or_else(T::max_value)))
}
