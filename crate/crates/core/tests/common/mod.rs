#![allow(dead_code)]

use metrikos::expr::BinaryFn;
use metrikos::{space_from_points, DistanceSpace, SpaceData, Tol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points uniform in `[0, 10]^2` under `|x - y|^power`.
pub fn planar_space(rng: &mut ChaCha8Rng, n: usize, power: f64) -> DistanceSpace<f64> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                m[i][j] = (dx * dx + dy * dy).sqrt().powf(power);
            }
        }
    }
    DistanceSpace::new(SpaceData::from_matrix(m), Tol::default()).expect("distinct random points")
}

/// Symmetric matrix with off-diagonal entries uniform in `[lo, hi]`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DistanceSpace<f64> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(lo..hi);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    DistanceSpace::from_matrix(m).unwrap()
}

pub fn squared_line(points: &[f64]) -> DistanceSpace<f64> {
    space_from_points(points, &BinaryFn::distance("(x-y)^2").unwrap(), Tol::default()).unwrap()
}

pub fn abs_line(points: &[f64]) -> DistanceSpace<f64> {
    space_from_points(points, &BinaryFn::distance("abs(x-y)").unwrap(), Tol::default()).unwrap()
}

/// Every simple path from `i` to `j`, as index sequences.
pub fn simple_paths(n: usize, i: usize, j: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, j: usize, path: &mut Vec<usize>, seen: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().unwrap();
        if cur == j {
            out.push(path.clone());
            return;
        }
        for next in 0..n {
            if !seen[next] {
                seen[next] = true;
                path.push(next);
                go(n, j, path, seen, out);
                path.pop();
                seen[next] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; n];
    seen[i] = true;
    go(n, j, &mut vec![i], &mut seen, &mut out);
    out
}

pub fn path_sum(space: &DistanceSpace<f64>, path: &[usize]) -> f64 {
    path.windows(2).map(|w| space.d(w[0], w[1])).sum()
}
