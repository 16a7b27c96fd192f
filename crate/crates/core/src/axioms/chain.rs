use serde::Serialize;

use crate::scalar::Scalar;
use crate::space::DistanceSpace;

/// All-pairs minimum chain sums with next-hop table for chain recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpMatrix<T> {
    sp: Vec<Vec<T>>,
    #[serde(skip)]
    next: Vec<Vec<usize>>,
}

impl<T: Scalar> SpMatrix<T> {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.sp[i][j]
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.sp
    }

    pub fn into_matrix(self) -> Vec<Vec<T>> {
        self.sp
    }

    pub fn len(&self) -> usize {
        self.sp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sp.is_empty()
    }

    /// A chain realizing `sp[i][j]`, endpoints included.
    pub fn chain(&self, i: usize, j: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut cur = i;
        while cur != j && out.len() <= self.sp.len() {
            cur = self.next[cur][j];
            out.push(cur);
        }
        out
    }
}

/// Minimum over all chains `u_1 = i, ..., u_N = j` of the summed distances.
/// Nonnegative weights make simple chains sufficient, so this is Floyd–Warshall.
pub fn all_pairs_min_chain<T: Scalar>(space: &DistanceSpace<T>) -> SpMatrix<T> {
    min_chain_matrix(space.matrix())
}

/// Floyd–Warshall over an arbitrary nonnegative symmetric weight matrix.
pub fn min_chain_matrix<T: Scalar>(weights: &[Vec<T>]) -> SpMatrix<T> {
    let n = weights.len();
    let mut sp: Vec<Vec<T>> = weights.to_vec();
    let mut next: Vec<Vec<usize>> = (0..n).map(|_| (0..n).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            let dik = sp[i][k];
            for j in 0..n {
                let via = dik + sp[k][j];
                if via < sp[i][j] {
                    sp[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    SpMatrix { sp, next }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_line_goes_through_middle() {
        let s = DistanceSpace::from_matrix(vec![
            vec![0.0, 1.0, 4.0],
            vec![1.0, 0.0, 1.0],
            vec![4.0, 1.0, 0.0],
        ])
        .unwrap();
        let sp = all_pairs_min_chain(&s);
        assert_eq!(sp.get(0, 2), 2.0);
        assert_eq!(sp.chain(0, 2), vec![0, 1, 2]);
        assert_eq!(sp.chain(1, 1), vec![1]);
    }

    #[test]
    fn two_points_unchanged() {
        let s = DistanceSpace::from_matrix(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        assert_eq!(all_pairs_min_chain(&s).matrix(), s.matrix());
    }
}
