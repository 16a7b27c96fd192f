use crate::axioms::chain::all_pairs_min_chain;
use crate::error::{Error, Result};
use crate::expr::ScalarFn;
use crate::params::FParams;
use crate::scalar::{Scalar, Tol};
use crate::space::DistanceSpace;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

pub(crate) const F_CHAIN_RELATION: &str = "f(d(x,y)) <= f(sum of chain) + alpha";

/// Chain condition of an F-metric. Since `f` is non-decreasing and edge
/// weights are nonnegative, the binding chain for each pair is the
/// minimum-sum chain, so each pair is compared against its shortest chain.
///
/// The first violating pair (lexicographic, `x < y`) is reported with a
/// realizing chain. Certificates: `alpha_required` (smallest alpha that
/// would pass) and `margin`.
pub fn check_f_metric<T: Scalar>(space: &DistanceSpace<T>, params: &FParams<T>, tol: Tol<T>) -> Result<Verdict<T>> {
    let sp = all_pairs_min_chain(space);
    let n = space.len();
    let mut alpha_required = T::zero();
    let mut first: Option<Witness<T>> = None;
    for x in 0..n {
        for y in (x + 1)..n {
            let lhs = params.f.eval(space.d(x, y))?;
            let at_chain = params.f.eval(sp.get(x, y))?;
            alpha_required = alpha_required.max(lhs - at_chain);
            let rhs = at_chain + params.alpha;
            if first.is_none() && !tol.le(lhs, rhs) {
                let chain = sp.chain(x, y).into_iter().map(|i| space.label(i).to_string());
                first = Some(
                    Witness::new(WitnessKind::FChain, F_CHAIN_RELATION, Cmp::Le, lhs, rhs, tol)
                        .at_points([space.label(x), space.label(y)])
                        .with_chain(chain)
                        .with_args([params.alpha]),
                );
            }
        }
    }
    Ok(Verdict::from_witness(first)
        .with_cert("alpha_required", alpha_required)
        .with_cert("margin", params.alpha - alpha_required))
}

/// Non-decreasing on a strictly increasing positive grid.
pub fn check_f1_monotone<T: Scalar>(f: &ScalarFn, grid: &[T], tol: Tol<T>) -> Result<Verdict<T>> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("monotonicity grid needs at least 2 points".into()));
    }
    if grid[0] <= T::zero() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "monotonicity grid must be positive and strictly increasing".into(),
        ));
    }
    let values = grid.iter().map(|&t| f.eval(t)).collect::<Result<Vec<T>, _>>()?;
    for i in 0..grid.len() - 1 {
        if !tol.le(values[i], values[i + 1]) {
            let w = Witness::new(WitnessKind::F1Monotone, "f(s) <= f(t) for s < t", Cmp::Le, values[i], values[i + 1], tol)
                .with_args([grid[i], grid[i + 1]]);
            return Ok(Verdict::fail(w));
        }
    }
    Ok(Verdict::pass())
}

/// Geometric schedule `t_k = t0 * q^k` and the number of threshold drops
/// required along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySchedule<T> {
    pub t0: T,
    pub q: T,
    pub drops: u32,
    /// Thresholds are `-scale * 10^j` for `j = 1..=drops`.
    pub scale: T,
    pub max_steps: usize,
}

impl<T: Scalar> DecaySchedule<T> {
    pub fn new(t0: T, q: T, drops: u32) -> Self {
        DecaySchedule {
            t0,
            q,
            drops,
            scale: T::lit(0.1),
            max_steps: 4096,
        }
    }

    pub fn thresholds(&self) -> Vec<T> {
        (1..=self.drops as i32).map(|j| -self.scale * T::lit(10.0).powi(j)).collect()
    }
}

/// Width of the trailing window that must be non-increasing.
const F2_TAIL: usize = 8;

/// Heuristic check that `f(t_k) -> -inf` as `t_k -> 0`: along the schedule,
/// `f` must drop below every threshold and be non-increasing over the last
/// steps before the final crossing. Marked `heuristic` in the certificates.
pub fn check_f2_limit<T: Scalar>(f: &ScalarFn, schedule: DecaySchedule<T>, tol: Tol<T>) -> Result<Verdict<T>> {
    let DecaySchedule { t0, q, drops, .. } = schedule;
    if !(t0 > T::zero() && t0.is_finite()) || !(q > T::zero() && q < T::one()) || drops < 1 {
        return Err(Error::InvalidParameter(
            "decay schedule needs t0 > 0, 0 < q < 1 and at least one drop".into(),
        ));
    }
    let thresholds = schedule.thresholds();
    let mut ts: Vec<T> = Vec::new();
    let mut fs: Vec<T> = Vec::new();
    let mut crossed = 0usize;
    let mut t = t0;
    while ts.len() <= schedule.max_steps && t >= T::min_positive_value() {
        let v = f.eval(t)?;
        ts.push(t);
        fs.push(v);
        while crossed < thresholds.len() && tol.lt(v, thresholds[crossed]) {
            crossed += 1;
        }
        if crossed == thresholds.len() {
            break;
        }
        t = t * q;
    }
    let steps = T::from_usize(ts.len()).unwrap_or_else(T::max_value);
    let base = |v: Verdict<T>| {
        v.with_cert("heuristic", T::one())
            .with_cert("steps", steps)
            .with_cert("thresholds_reached", T::from_usize(crossed).unwrap_or_else(T::zero))
    };
    let last = ts.len() - 1;
    if crossed < thresholds.len() {
        let w = Witness::new(WitnessKind::F2Threshold, "f(t) < threshold", Cmp::Lt, fs[last], thresholds[crossed], tol)
            .with_args([ts[last], thresholds[crossed]]);
        return Ok(base(Verdict::fail(w)));
    }
    let start = last.saturating_sub(F2_TAIL);
    for k in start..last {
        if !tol.le(fs[k + 1], fs[k]) {
            let w = Witness::new(
                WitnessKind::F2Decreasing,
                "f(t_{k+1}) <= f(t_k)",
                Cmp::Le,
                fs[k + 1],
                fs[k],
                tol,
            )
            .with_args([ts[k], ts[k + 1]]);
            return Ok(base(Verdict::fail(w)));
        }
    }
    Ok(base(Verdict::pass()).with_cert("t_final", ts[last]))
}

/// Geometric grid `base^lo, ..., base^hi`.
pub fn geometric_grid<T: Scalar>(base: T, lo: i32, hi: i32) -> Vec<T> {
    (lo..=hi).map(|e| base.powi(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{presets, BinaryFn};
    use crate::space::space_from_points;

    fn squared(points: &[f64]) -> DistanceSpace<f64> {
        space_from_points(points, &BinaryFn::distance("(x-y)^2").unwrap(), Tol::default()).unwrap()
    }

    #[test]
    fn ln_with_ln3_passes_on_squared_line() {
        let p = FParams::parse("ln(t)", 3.0_f64.ln()).unwrap();
        let v = check_f_metric(&squared(&[0.0, 1.0, 2.0]), &p, Tol::default()).unwrap();
        assert!(v.pass);
        assert!((v.cert("alpha_required").unwrap() - 2.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_without_slack_fails_with_chain() {
        let p = FParams::parse("ln(t)", 0.0).unwrap();
        let v = check_f_metric(&squared(&[0.0, 1.0, 2.0]), &p, Tol::default()).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.points, vec!["0", "2"]);
        assert_eq!(w.chain, vec!["0", "1", "2"]);
        assert_eq!(w.lhs, 4.0_f64.ln());
        assert_eq!(w.rhs, 2.0_f64.ln());
    }

    #[test]
    fn metric_spaces_pass_for_every_preset() {
        let s = space_from_points(&[0.0, 0.5, 2.0, 3.5], &BinaryFn::distance("abs(x-y)").unwrap(), Tol::default())
            .unwrap();
        for f in presets::F_ALL {
            let p = FParams::parse(f, 0.0).unwrap();
            assert!(check_f_metric(&s, &p, Tol::default()).unwrap().pass, "{f}");
        }
    }

    #[test]
    fn domain_error_names_argument() {
        let p = FParams::parse("ln(t-1)", 0.0).unwrap();
        let err = check_f_metric(&squared(&[0.0, 1.0, 2.0]), &p, Tol::default()).unwrap_err();
        assert!(err.to_string().contains("t=1"), "{err}");
    }

    #[test]
    fn monotone_presets_and_planted_decrease() {
        let grid = geometric_grid(10.0_f64, -6, 3);
        for f in ["ln(t)", "-1/t"] {
            assert!(check_f1_monotone(&ScalarFn::parse(f).unwrap(), &grid, Tol::default()).unwrap().pass);
        }
        let v = check_f1_monotone(&ScalarFn::parse("exp(-t)").unwrap(), &[1.0, 2.0], Tol::default()).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.args, vec![1.0, 2.0]);
    }

    #[test]
    fn monotone_grid_validation() {
        let f = ScalarFn::parse("t").unwrap();
        assert!(check_f1_monotone(&f, &[1.0_f64], Tol::default()).is_err());
        assert!(check_f1_monotone(&f, &[2.0_f64, 1.0], Tol::default()).is_err());
        assert!(check_f1_monotone(&f, &[0.0_f64, 1.0], Tol::default()).is_err());
    }

    #[test]
    fn limit_heuristic() {
        let sched = DecaySchedule::new(1.0_f64, 0.1, 3);
        let ln = check_f2_limit(&ScalarFn::parse("ln(t)").unwrap(), sched, Tol::default()).unwrap();
        assert!(ln.pass && ln.is_heuristic());
        // -k ln 10 < -100 first at k = 44
        assert_eq!(ln.cert("steps"), Some(45.0));
        let recip = check_f2_limit(&ScalarFn::parse("-1/t").unwrap(), sched, Tol::default()).unwrap();
        assert!(recip.pass);
        assert_eq!(recip.cert("steps"), Some(4.0));
        let id = check_f2_limit(&ScalarFn::parse("t").unwrap(), sched, Tol::default()).unwrap();
        assert!(!id.pass);
        assert_eq!(id.witness.unwrap().kind, WitnessKind::F2Threshold);
    }

    #[test]
    fn limit_rejects_bad_schedule() {
        let f = ScalarFn::parse("ln(t)").unwrap();
        assert!(check_f2_limit(&f, DecaySchedule::new(1.0_f64, 1.0, 1), Tol::default()).is_err());
        assert!(check_f2_limit(&f, DecaySchedule::new(0.0_f64, 0.5, 1), Tol::default()).is_err());
        assert!(check_f2_limit(&f, DecaySchedule::new(1.0_f64, 0.5, 0), Tol::default()).is_err());
    }
}
