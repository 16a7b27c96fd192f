use crate::params::BParams;
use crate::scalar::{Scalar, Tol};
use crate::space::DistanceSpace;
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

pub(crate) const B_RELATION: &str = "d(x,z) <= K*(d(x,y)+d(y,z))";

/// Largest ratio `d(x,z) / (d(x,y) + d(y,z))` over ordered triples with
/// `x != z`, with the first triple (lexicographic) attaining it.
pub(crate) fn max_b_ratio<T: Scalar>(space: &DistanceSpace<T>) -> (T, Option<[usize; 3]>) {
    let n = space.len();
    let mut best = T::one();
    let mut arg = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == z {
                    continue;
                }
                let ratio = space.d(x, z) / (space.d(x, y) + space.d(y, z));
                if arg.is_none() || ratio > best {
                    best = ratio;
                    arg = Some([x, y, z]);
                }
            }
        }
    }
    (best, arg)
}

/// Smallest `K` for which the relaxed triangle inequality holds.
/// At least 1 whenever there are two points (take `y = x`); 1 for a singleton.
pub fn min_b_constant<T: Scalar>(space: &DistanceSpace<T>) -> T {
    max_b_ratio(space).0
}

/// Checks `d(x,z) <= K [d(x,y) + d(y,z)]` on every ordered triple.
/// The witness is the violating triple of largest ratio.
pub fn check_b<T: Scalar>(space: &DistanceSpace<T>, params: BParams<T>, tol: Tol<T>) -> Verdict<T> {
    let k = params.k;
    let k_min = min_b_constant(space);
    let n = space.len();
    let mut worst: Option<(T, [usize; 3])> = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == z {
                    continue;
                }
                let sum = space.d(x, y) + space.d(y, z);
                if !tol.le(space.d(x, z), k * sum) {
                    let ratio = space.d(x, z) / sum;
                    if worst.is_none_or(|(r, _)| ratio > r) {
                        worst = Some((ratio, [x, y, z]));
                    }
                }
            }
        }
    }
    let witness = worst.map(|(_, [x, y, z])| {
        let sum = space.d(x, y) + space.d(y, z);
        Witness::new(WitnessKind::BTriangle, B_RELATION, Cmp::Le, space.d(x, z), k * sum, tol)
            .at_points([space.label(x), space.label(y), space.label(z)])
            .with_args([k])
    });
    Verdict::from_witness(witness)
        .with_cert("K_min", k_min)
        .with_cert("margin", k - k_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryFn;
    use crate::space::space_from_points;

    fn squared(points: &[f64]) -> DistanceSpace<f64> {
        space_from_points(points, &BinaryFn::distance("(x-y)^2").unwrap(), Tol::default()).unwrap()
    }

    #[test]
    fn squared_line_needs_two() {
        let s = squared(&[0.0, 1.0, 2.0]);
        assert_eq!(min_b_constant(&s), 2.0);
        let v = check_b(&s, BParams { k: 2.0 }, Tol::default());
        assert!(v.pass);
        assert_eq!(v.cert("K_min"), Some(2.0));
    }

    #[test]
    fn insufficient_coefficient_witness() {
        let s = squared(&[0.0, 1.0, 2.0]);
        let v = check_b(&s, BParams { k: 1.5 }, Tol::default());
        let w = v.witness.unwrap();
        assert_eq!(w.points, vec!["0", "1", "2"]);
        assert_eq!((w.lhs, w.rhs), (4.0, 3.0));
    }

    #[test]
    fn below_one_always_fails() {
        let s = DistanceSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(min_b_constant(&s), 1.0);
        let v = check_b(&s, BParams { k: 0.5 }, Tol::default());
        assert!(!v.pass);
        assert!(v.witness.unwrap().is_violation());
    }

    #[test]
    fn metric_on_line_is_one_and_singleton_is_one() {
        let s = space_from_points(&[0.0, 1.0, 2.0], &BinaryFn::distance("abs(x-y)").unwrap(), Tol::default()).unwrap();
        assert_eq!(min_b_constant(&s), 1.0);
        let single = DistanceSpace::from_matrix(vec![vec![0.0]]).unwrap();
        assert_eq!(min_b_constant(&single), 1.0);
    }
}
