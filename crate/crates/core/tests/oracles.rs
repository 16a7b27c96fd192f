mod common;

use common::*;
use metrikos::axioms::{all_pairs_min_chain, check_b, check_f_metric, min_b_constant};
use metrikos::metrize::{chain_metric, WeightTransform};
use metrikos::regularity::{locally_regular_phi, uniform_phi, verify_iii_c};
use metrikos::{BParams, DistanceSpace, FParams, Tol};

fn brute_k_min(space: &DistanceSpace<f64>) -> f64 {
    let n = space.len();
    let mut best: f64 = 1.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != z {
                    best = best.max(space.d(x, z) / (space.d(x, y) + space.d(y, z)));
                }
            }
        }
    }
    best
}

#[test]
fn squared_three_points_worked_examples() {
    let s = squared_line(&[0.0, 1.0, 2.0]);
    assert_eq!(brute_k_min(&s), 2.0);
    assert_eq!(min_b_constant(&s), 2.0);
    let sp = all_pairs_min_chain(&s);
    let oracle = simple_paths(3, 0, 2).iter().map(|p| path_sum(&s, p)).fold(f64::INFINITY, f64::min);
    assert_eq!(sp.get(0, 2), oracle);
    assert_eq!(oracle, 2.0);
}

#[test]
fn min_chain_matches_simple_path_enumeration() {
    let mut r = rng(11);
    for trial in 0..40 {
        let n = 2 + trial % 6;
        let s = if trial % 2 == 0 { planar_space(&mut r, n, 2.0) } else { random_matrix(&mut r, n, 0.1, 5.0) };
        let sp = all_pairs_min_chain(&s);
        for i in 0..n {
            for j in 0..n {
                let paths = simple_paths(n, i, j);
                let best = paths.iter().map(|p| path_sum(&s, p)).fold(f64::INFINITY, f64::min);
                assert!((sp.get(i, j) - best).abs() <= 1e-12 * best.max(1.0), "trial {trial} ({i},{j})");
                let chain = sp.chain(i, j);
                assert_eq!((chain[0], *chain.last().unwrap()), (i, j));
                assert!((path_sum(&s, &chain) - sp.get(i, j)).abs() <= 1e-12 * best.max(1.0));
            }
        }
    }
}

#[test]
fn b_verdict_matches_brute_force() {
    let mut r = rng(12);
    let tol = Tol::default();
    for trial in 0..60 {
        let n = 2 + trial % 8;
        let s = if trial % 3 == 0 { random_matrix(&mut r, n, 0.1, 5.0) } else { planar_space(&mut r, n, 2.0) };
        let k = brute_k_min(&s);
        assert_eq!(min_b_constant(&s), k);
        assert!(check_b(&s, BParams::new(k).unwrap(), tol).pass);
        let below = check_b(&s, BParams::new(k * (1.0 - 1e-6)).unwrap(), tol);
        assert!(!below.pass, "trial {trial}");
        let w = below.witness.unwrap();
        let (x, y, z) = (
            s.index_of(&w.points[0]).unwrap(),
            s.index_of(&w.points[1]).unwrap(),
            s.index_of(&w.points[2]).unwrap(),
        );
        assert_eq!(s.d(x, z) / (s.d(x, y) + s.d(y, z)), k);
    }
}

/// Checks (D3) on every simple chain rather than only the shortest one.
fn f_oracle(s: &DistanceSpace<f64>, p: &FParams<f64>, tol: Tol<f64>) -> Option<(usize, usize)> {
    let n = s.len();
    for x in 0..n {
        for y in (x + 1)..n {
            let lhs = p.f.eval(s.d(x, y)).unwrap();
            for path in simple_paths(n, x, y) {
                if !tol.le(lhs, p.f.eval(path_sum(s, &path)).unwrap() + p.alpha) {
                    return Some((x, y));
                }
            }
        }
    }
    None
}

#[test]
fn f_metric_matches_chain_enumeration() {
    let mut r = rng(13);
    let tol = Tol::default();
    let params = [
        FParams::parse("ln(t)", 3f64.ln()).unwrap(),
        FParams::parse("ln(t)", 0.0).unwrap(),
        FParams::parse("-1/t", 1.0).unwrap(),
        FParams::parse("ln(t)+t", 0.5).unwrap(),
    ];
    for trial in 0..30 {
        let n = 3 + trial % 5;
        let s = planar_space(&mut r, n, 1.0 + (trial % 3) as f64 * 0.5);
        for p in &params {
            let v = check_f_metric(&s, p, tol).unwrap();
            let oracle = f_oracle(&s, p, tol);
            assert_eq!(v.pass, oracle.is_none(), "trial {trial} {}", p.f);
            if let (Some(w), Some((x, y))) = (v.witness, oracle) {
                assert_eq!(w.points, vec![s.label(x), s.label(y)]);
            }
        }
    }
}

#[test]
fn phi_search_matches_exhaustive_candidate_scan() {
    let mut r = rng(14);
    let tol = Tol::default();
    for trial in 0..20 {
        let n = 2 + trial % 6;
        let s = planar_space(&mut r, n, 2.0);
        let mut cands: Vec<f64> = Vec::new();
        let dd = s.distinct_distances();
        for (i, &d) in dd.iter().enumerate() {
            cands.push(d);
            if i + 1 < dd.len() {
                cands.push((d + dd[i + 1]) / 2.0);
            }
        }
        for eps in [0.5, 4.0, 30.0] {
            let holds = |a: usize, phi: f64| {
                (0..n).all(|b| {
                    (0..n).all(|c| !(s.d(a, b) < phi && s.d(b, c) < phi) || tol.lt(s.d(a, c), eps))
                })
            };
            let mut uniform = f64::INFINITY;
            for a in 0..n {
                let best = cands.iter().copied().filter(|&phi| holds(a, phi)).fold(f64::NAN, f64::max);
                let got = locally_regular_phi(&s, s.label(a), eps, tol).unwrap().unwrap();
                assert_eq!(got.value, best, "trial {trial} eps {eps}");
                uniform = uniform.min(best);
            }
            assert_eq!(uniform_phi(&s, eps, tol).unwrap().unwrap().value, uniform);
        }
    }
}

#[test]
fn iii_c_worked_examples() {
    let s = squared_line(&[0.0, 1.0, 2.0]);
    let tol = Tol::default();
    let k = min_b_constant(&s);
    assert!(verify_iii_c(&s, "0", 4.0, 4.0 / k, tol).unwrap().pass);
    let w = verify_iii_c(&s, "0", 4.0, 2.5, tol).unwrap().witness.unwrap();
    assert_eq!(&w.points[1..], &["2", "1"]);
}

#[test]
fn chain_metric_worked_examples() {
    let s = squared_line(&[0.0, 1.0, 2.0, 3.0]);
    let r = chain_metric(&s, &WeightTransform::Identity).unwrap();
    let oracle = simple_paths(4, 0, 3).iter().map(|p| path_sum(&s, p)).fold(f64::INFINITY, f64::min);
    assert_eq!(r.metric[0][3], oracle);
    assert_eq!(r.max_distortion, 3.0);
    let r = chain_metric(&squared_line(&[0.0, 1.0, 2.0]), &WeightTransform::power(0.5).unwrap()).unwrap();
    assert_eq!(r.metric[0][2], 2.0);
    assert_eq!(r.max_distortion, 1.0);
    let m = abs_line(&[0.0, 2.0, 2.5, 7.0]);
    assert_eq!(chain_metric(&m, &WeightTransform::Identity).unwrap().metric, m.matrix());
}
