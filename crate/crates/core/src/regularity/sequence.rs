use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tol};
use crate::space::SampledSequence;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

/// Trace form of the sequence condition: on the tail where both
/// `D(a_n, a)` and `D(a_n, b_n)` stay below `threshold`, `D(b_n, a)` must end
/// below `threshold_b` (defaults to `threshold`).
///
/// The tail is the longest suffix on which both premise traces are below the
/// threshold (exact comparison). On finite traces "eventually below" means the
/// last tail value is below `threshold_b`; the witness is the first tail index
/// `n` (1-based) where `D(b_n, a)` is not. An empty tail passes with the
/// certificate `vacuous = 1`.
pub fn check_iii_b<T: Scalar>(
    d_an_a: &SampledSequence<T>,
    d_an_bn: &SampledSequence<T>,
    d_bn_a: &SampledSequence<T>,
    threshold: T,
    threshold_b: Option<T>,
    tol: Tol<T>,
) -> Result<Verdict<T>> {
    let n = d_an_a.len();
    if d_an_bn.len() != n || d_bn_a.len() != n {
        return Err(Error::LengthMismatch(format!(
            "traces {}, {}, {} have lengths {}, {}, {}",
            d_an_a.name(),
            d_an_bn.name(),
            d_bn_a.name(),
            n,
            d_an_bn.len(),
            d_bn_a.len()
        )));
    }
    if !(threshold > T::zero()) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {threshold}")));
    }
    let target = threshold_b.unwrap_or(threshold);
    let (aa, ab, ba) = (d_an_a.values(), d_an_bn.values(), d_bn_a.values());
    let mut start = n;
    while start > 0 && aa[start - 1] < threshold && ab[start - 1] < threshold {
        start -= 1;
    }
    let idx = |i: usize| T::from_usize(i + 1).unwrap_or_else(T::max_value);
    let base = |v: Verdict<T>| v.with_cert("threshold_b", target);
    if start == n {
        return Ok(base(Verdict::pass()).with_cert("vacuous", T::one()));
    }
    if tol.lt(ba[n - 1], target) {
        return Ok(base(Verdict::pass()).with_cert("tail_start", idx(start)));
    }
    let first = (start..n)
        .find(|&i| !tol.lt(ba[i], target))
        .expect("last tail value fails");
    let w = Witness::new(WitnessKind::IiiB, "D(b_n,a) < threshold on the tail", Cmp::Lt, ba[first], target, tol)
        .at_points([d_bn_a.name()])
        .with_args([idx(first), target]);
    Ok(base(Verdict::fail(w)).with_cert("tail_start", idx(start)))
}
