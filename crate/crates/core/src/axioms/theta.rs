use crate::error::{Error, Result};
use crate::params::ThetaParams;
use crate::scalar::{Scalar, Tol};
use crate::space::DistanceSpace;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

/// `{0} ∪ {2^-10, ..., 2^4}`.
pub fn default_action_grid<T: Scalar>() -> Vec<T> {
    let mut g = vec![T::zero()];
    g.extend((-10..=4).map(|e| T::lit(2.0).powi(e)));
    g
}

/// Inserts the geometric midpoint between consecutive positive grid values.
/// Every existing value is kept.
pub fn refine_grid<T: Scalar>(grid: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(grid.len() * 2);
    for w in grid.windows(2) {
        out.push(w[0]);
        if w[0] > T::zero() {
            out.push((w[0] * w[1]).sqrt());
        }
    }
    if let Some(&last) = grid.last() {
        out.push(last);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActionAxiom {
    /// θ(0,0) = 0 and symmetry.
    Origin,
    /// Strict monotonicity.
    Monotone,
    /// Solvability of θ(s,t) = m over the image.
    Solvable,
    /// θ(s,0) <= s.
    Bound,
}

impl ActionAxiom {
    pub const ALL: [ActionAxiom; 4] = [
        ActionAxiom::Origin,
        ActionAxiom::Monotone,
        ActionAxiom::Bound,
        ActionAxiom::Solvable,
    ];
}

/// At most this many grid points seed the image samples for solvability.
const IMAGE_SEEDS: usize = 16;
const BISECTION_STEPS: usize = 80;

struct ActionTable<'a, T> {
    theta: &'a ThetaParams,
    grid: &'a [T],
    values: Vec<Vec<T>>,
}

impl<'a, T: Scalar> ActionTable<'a, T> {
    fn new(theta: &'a ThetaParams, grid: &'a [T]) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for &s in grid {
            let mut row = Vec::with_capacity(grid.len());
            for &t in grid {
                row.push(theta.theta.eval(s, t)?);
            }
            values.push(row);
        }
        Ok(ActionTable { theta, grid, values })
    }

    fn at(&self, i: usize, j: usize) -> T {
        self.values[i][j]
    }

    fn monotone_witness(&self, x: usize, y: usize, s: usize, t: usize, tol: Tol<T>) -> Option<Witness<T>> {
        let g = self.grid;
        let lhs = self.at(x, y);
        let rhs = self.at(s, t);
        if tol.lt(lhs, rhs) {
            return None;
        }
        Some(
            Witness::new(WitnessKind::BActionMonotone, "theta(x,y) < theta(s,t)", Cmp::Lt, lhs, rhs, tol)
                .with_args([g[x], g[y], g[s], g[t]]),
        )
    }
}

/// Validates the B-action axioms on `grid` (which must start at 0 and be
/// strictly increasing, at least 3 points). Axioms are checked in the order
/// origin/symmetry, monotonicity, `θ(s,0) <= s`, solvability; the first
/// failure is reported. Solvability is sampled and marked heuristic.
pub fn check_b_action<T: Scalar>(theta: &ThetaParams, grid: &[T], tol: Tol<T>) -> Result<Verdict<T>> {
    check_action_axioms(theta, grid, &ActionAxiom::ALL, tol)
}

pub fn check_action_axioms<T: Scalar>(
    theta: &ThetaParams,
    grid: &[T],
    axioms: &[ActionAxiom],
    tol: Tol<T>,
) -> Result<Verdict<T>> {
    if grid.len() < 3 || grid[0] != T::zero() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "action grid must start at 0, be strictly increasing and have at least 3 points".into(),
        ));
    }
    let table = ActionTable::new(theta, grid)?;
    let mut ordered = axioms.to_vec();
    ordered.sort_by_key(|a| ActionAxiom::ALL.iter().position(|b| b == a));
    ordered.dedup();
    let mut verdict = Verdict::pass();
    for axiom in ordered {
        let witness = match axiom {
            ActionAxiom::Origin => origin_violation(&table, tol),
            ActionAxiom::Monotone => monotone_violation(&table, tol),
            ActionAxiom::Bound => bound_violation(&table, tol),
            ActionAxiom::Solvable => {
                verdict = verdict.with_cert("heuristic", T::one());
                let (w, samples) = solvability_violation(&table, tol)?;
                verdict = verdict.with_cert("image_samples", T::from_usize(samples).unwrap_or_else(T::max_value));
                w
            }
        };
        if let Some(w) = witness {
            let mut failed = Verdict::fail(w);
            failed.certificates = verdict.certificates;
            return Ok(failed);
        }
    }
    Ok(verdict)
}

fn origin_violation<T: Scalar>(table: &ActionTable<'_, T>, tol: Tol<T>) -> Option<Witness<T>> {
    let origin = table.at(0, 0);
    if !tol.eq(origin, T::zero()) {
        return Some(
            Witness::new(WitnessKind::BActionOrigin, "theta(0,0) = 0", Cmp::Eq, origin, T::zero(), tol)
                .with_args([T::zero(), T::zero()]),
        );
    }
    let n = table.grid.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if !tol.eq(table.at(i, j), table.at(j, i)) {
                return Some(
                    Witness::new(
                        WitnessKind::BActionSymmetry,
                        "theta(s,t) = theta(t,s)",
                        Cmp::Eq,
                        table.at(i, j),
                        table.at(j, i),
                        tol,
                    )
                    .with_args([table.grid[i], table.grid[j]]),
                );
            }
        }
    }
    None
}

/// Strict monotonicity under the premise `x <= s, y < t` or `x < s, y <= t`.
///
/// On a grid this is equivalent to strict increase across every adjacent step
/// in each coordinate. Before the adjacent scan, a half-step probe at the grid
/// point nearest 1 is tried: θ(p,0) against θ(p,h) and θ(0,p) against θ(h,p)
/// with `h` the largest grid value `<= p/2`. That keeps reported tuples at
/// unit scale when a violation is visible there.
fn monotone_violation<T: Scalar>(table: &ActionTable<'_, T>, tol: Tol<T>) -> Option<Witness<T>> {
    let g = table.grid;
    let n = g.len();
    let p = (1..n)
        .min_by(|&a, &b| {
            let da = (g[a].ln()).abs();
            let db = (g[b].ln()).abs();
            da.partial_cmp(&db).expect("finite grid")
        })
        .expect("grid has positive points");
    let half = g[p] / T::lit(2.0);
    if let Some(h) = (1..p).rev().find(|&i| g[i] <= half) {
        if let Some(w) = table.monotone_witness(p, 0, p, h, tol) {
            return Some(w);
        }
        if let Some(w) = table.monotone_witness(0, p, h, p, tol) {
            return Some(w);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n {
                if let Some(w) = table.monotone_witness(i, j, i, j + 1, tol) {
                    return Some(w);
                }
            }
            if i + 1 < n {
                if let Some(w) = table.monotone_witness(i, j, i + 1, j, tol) {
                    return Some(w);
                }
            }
        }
    }
    None
}

fn bound_violation<T: Scalar>(table: &ActionTable<'_, T>, tol: Tol<T>) -> Option<Witness<T>> {
    for (i, &s) in table.grid.iter().enumerate().skip(1) {
        let v = table.at(i, 0);
        if !tol.le(v, s) {
            return Some(
                Witness::new(WitnessKind::BActionBound, "theta(s,0) <= s", Cmp::Le, v, s, tol).with_args([s]),
            );
        }
    }
    None
}

/// For sampled image values `m = θ(s0,t0)` and each grid `t` in `[0, m]`,
/// bisection-solves `θ(s,t) = m` for `s` in `[0, m]`.
fn solvability_violation<T: Scalar>(table: &ActionTable<'_, T>, tol: Tol<T>) -> Result<(Option<Witness<T>>, usize)> {
    let g = table.grid;
    let n = g.len();
    let stride = n.div_ceil(IMAGE_SEEDS).max(1);
    let mut seeds: Vec<usize> = (0..n).step_by(stride).collect();
    if *seeds.last().expect("nonempty") != n - 1 {
        seeds.push(n - 1);
    }
    let mut images: Vec<T> = Vec::new();
    for (a, &i) in seeds.iter().enumerate() {
        for &j in &seeds[a..] {
            images.push(table.at(i, j));
        }
    }
    images.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    images.dedup();
    let theta = &table.theta.theta;
    let solvable = |m: T, t: T, s: T, v: T, cmp: Cmp| {
        Witness::new(WitnessKind::BActionSolvable, "theta(s,t) = m for some s in [0,m]", cmp, v, m, tol)
            .with_args([m, t, s])
    };
    for &m in &images {
        for &t in g.iter().take_while(|&&t| t <= m) {
            let at_zero = theta.eval(T::zero(), t)?;
            if !tol.le(at_zero, m) {
                return Ok((Some(solvable(m, t, T::zero(), at_zero, Cmp::Le)), images.len()));
            }
            let at_m = theta.eval(m, t)?;
            if !tol.ge(at_m, m) {
                return Ok((Some(solvable(m, t, m, at_m, Cmp::Ge)), images.len()));
            }
            let (mut lo, mut hi) = (T::zero(), m);
            for _ in 0..BISECTION_STEPS {
                let mid = (lo + hi) / T::lit(2.0);
                if mid <= lo || mid >= hi {
                    break;
                }
                if theta.eval(mid, t)? < m {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let v_lo = theta.eval(lo, t)?;
            let v_hi = theta.eval(hi, t)?;
            let (s, v) = if (v_lo - m).abs() <= (v_hi - m).abs() { (lo, v_lo) } else { (hi, v_hi) };
            if !tol.eq(v, m) {
                return Ok((Some(solvable(m, t, s, v, Cmp::Eq)), images.len()));
            }
        }
    }
    Ok((None, images.len()))
}

/// Checks `d(x,z) <= θ(d(x,y), d(y,z))` on all ordered triples; the witness
/// is the largest violation.
pub fn check_theta_metric<T: Scalar>(space: &DistanceSpace<T>, theta: &ThetaParams, tol: Tol<T>) -> Result<Verdict<T>> {
    let n = space.len();
    let mut margin: Option<T> = None;
    let mut worst: Option<(T, [usize; 3], T)> = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let bound = theta.theta.eval(space.d(x, y), space.d(y, z))?;
                let lhs = space.d(x, z);
                let gap = bound - lhs;
                margin = Some(margin.map_or(gap, |m| m.min(gap)));
                if !tol.le(lhs, bound) && worst.is_none_or(|(v, _, _)| -gap > v) {
                    worst = Some((-gap, [x, y, z], bound));
                }
            }
        }
    }
    let witness = worst.map(|(_, [x, y, z], bound)| {
        Witness::new(
            WitnessKind::ThetaTriangle,
            "d(x,z) <= theta(d(x,y),d(y,z))",
            Cmp::Le,
            space.d(x, z),
            bound,
            tol,
        )
        .at_points([space.label(x), space.label(y), space.label(z)])
    });
    Ok(Verdict::from_witness(witness).with_cert("margin", margin.unwrap_or_else(T::zero)))
}

/// Left fold `θ(...θ(θ(v1,v2),v3)...,vN)`; a single value folds to itself.
pub fn theta_fold<T: Scalar>(theta: &ThetaParams, values: &[T]) -> Result<T> {
    let (&first, rest) = values
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("theta_fold needs at least one value".into()))?;
    rest.iter()
        .try_fold(first, |acc, &v| theta.theta.eval(acc, v).map_err(Error::from))
}

/// `d(first, last) <= fold of the chain's edge distances`.
pub fn check_chain_bound<T: Scalar, S: AsRef<str>>(
    space: &DistanceSpace<T>,
    theta: &ThetaParams,
    chain: &[S],
    tol: Tol<T>,
) -> Result<Verdict<T>> {
    if chain.len() < 2 {
        return Err(Error::InvalidParameter("chain needs at least 2 points".into()));
    }
    let idx = chain
        .iter()
        .map(|l| space.index_of(l.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let edges: Vec<T> = idx.windows(2).map(|w| space.d(w[0], w[1])).collect();
    let bound = theta_fold(theta, &edges)?;
    let lhs = space.d(idx[0], idx[idx.len() - 1]);
    let verdict = if tol.le(lhs, bound) {
        Verdict::pass()
    } else {
        Verdict::fail(
            Witness::new(WitnessKind::ChainBound, "d(u_1,u_N) <= theta-fold of chain", Cmp::Le, lhs, bound, tol)
                .at_points(chain.iter().map(|l| l.as_ref().to_string())),
        )
    };
    Ok(verdict.with_cert("fold", bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryFn;
    use crate::space::space_from_points;

    fn action(src: &str) -> ThetaParams {
        ThetaParams::parse(src).unwrap()
    }

    fn squared(points: &[f64]) -> DistanceSpace<f64> {
        space_from_points(points, &BinaryFn::distance("(x-y)^2").unwrap(), Tol::default()).unwrap()
    }

    #[test]
    fn default_grid_shape() {
        let g: Vec<f64> = default_action_grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 2f64.powi(-10));
        assert_eq!(g[15], 16.0);
        let r = refine_grid(&g);
        assert_eq!(r.len(), 30);
        assert!(r.contains(&0.5) && r.contains(&1.0));
    }

    #[test]
    fn sum_and_sum_product_are_actions() {
        let grid = default_action_grid::<f64>();
        assert!(check_b_action(&action("s+t"), &grid, Tol::default()).unwrap().pass);
        let v = check_b_action(&action("s+t+s*t"), &grid, Tol::default()).unwrap();
        assert!(v.pass);
        assert!(v.is_heuristic());
    }

    #[test]
    fn max_fails_monotonicity_at_unit_probe() {
        let grid = default_action_grid::<f64>();
        let v = check_b_action(&action("max(s,t)"), &grid, Tol::default()).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::BActionMonotone);
        assert_eq!(w.args, vec![1.0, 0.0, 1.0, 0.5]);
        assert_eq!((w.lhs, w.rhs), (1.0, 1.0));
    }

    #[test]
    fn doubled_sum_fails_bound() {
        let grid = default_action_grid::<f64>();
        let w = check_b_action(&action("2*(s+t)"), &grid, Tol::default()).unwrap().witness.unwrap();
        assert_eq!(w.kind, WitnessKind::BActionBound);
    }

    #[test]
    fn asymmetric_and_offset_actions_fail_origin() {
        let grid = default_action_grid::<f64>();
        let w = check_b_action(&action("s+2*t"), &grid, Tol::default()).unwrap().witness.unwrap();
        assert_eq!(w.kind, WitnessKind::BActionSymmetry);
        let w = check_b_action(&action("s+t+1"), &grid, Tol::default()).unwrap().witness.unwrap();
        assert_eq!(w.kind, WitnessKind::BActionOrigin);
    }

    #[test]
    fn mean_fails_solvability() {
        // symmetric, strictly increasing and below s on the axis, but theta(m,t) < m for t < m
        let theta = action("(s+t)/2");
        let grid = default_action_grid::<f64>();
        let v = check_b_action(&theta, &grid, Tol::default()).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::BActionSolvable, "{w}");
        assert_eq!(w.cmp, Cmp::Ge);
    }

    #[test]
    fn grid_validation() {
        assert!(check_b_action(&action("s+t"), &[0.0, 1.0], Tol::default()).is_err());
        assert!(check_b_action(&action("s+t"), &[1.0, 2.0, 3.0], Tol::default()).is_err());
    }

    #[test]
    fn theta_metric_examples() {
        let tol = Tol::default();
        let metric = space_from_points(&[0.0, 1.5, 4.0], &BinaryFn::distance("abs(x-y)").unwrap(), tol).unwrap();
        assert!(check_theta_metric(&metric, &action("s+t"), tol).unwrap().pass);
        let sq = squared(&[0.0, 1.0, 2.0]);
        let w = check_theta_metric(&sq, &action("s+t"), tol).unwrap().witness.unwrap();
        assert_eq!(w.points, vec!["0", "1", "2"]);
        assert!(check_theta_metric(&sq, &action("2*(s+t)"), tol).unwrap().pass);
    }

    #[test]
    fn folds() {
        assert_eq!(theta_fold(&action("s+t"), &[1.0, 1.0, 4.0]).unwrap(), 6.0);
        assert_eq!(theta_fold(&action("s+t+s*t"), &[1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(theta_fold(&action("s+t+s*t"), &[1.0, 1.0, 1.0]).unwrap(), 7.0);
        assert_eq!(theta_fold(&action("s+t"), &[2.5]).unwrap(), 2.5);
        assert!(theta_fold::<f64>(&action("s+t"), &[]).is_err());
    }

    #[test]
    fn chain_bounds() {
        let tol = Tol::default();
        let sq = squared(&[0.0, 1.0, 2.0]);
        let v = check_chain_bound(&sq, &action("2*(s+t)"), &["0", "1", "2"], tol).unwrap();
        assert!(v.pass);
        assert_eq!(v.cert("fold"), Some(4.0));
        let v = check_chain_bound(&sq, &action("s+t"), &["0", "2"], tol).unwrap();
        assert!(v.pass);
        assert_eq!(v.cert("fold"), Some(4.0));
        assert!(!check_chain_bound(&sq, &action("s+t"), &["0", "1", "2"], tol).unwrap().pass);
        assert!(matches!(
            check_chain_bound(&sq, &action("s+t"), &["0", "9"], tol),
            Err(Error::UnknownLabel(_))
        ));
    }
}
