//! Finite distance spaces and sampled distance traces.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::BinaryFn;
use crate::scalar::{Scalar, Tol};
use crate::verdict::{Cmp, Verdict, Witness, WitnessKind};

/// Unvalidated space as it appears on disk: `{"labels": [...], "matrix": [[...]]}`.
/// Missing labels default to `p0, p1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceData<T> {
    #[serde(default)]
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<T>>,
}

impl<T: Scalar> SpaceData<T> {
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<T>>) -> Self {
        SpaceData { labels, matrix }
    }

    pub fn from_matrix(matrix: Vec<Vec<T>>) -> Self {
        SpaceData {
            labels: Vec::new(),
            matrix,
        }
    }

    /// Structural checks: nonempty, square, finite, labels distinct and matching.
    /// Fills in default labels.
    fn normalized(&self) -> Result<SpaceData<T>> {
        let n = self.matrix.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        for (row, r) in self.matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
        }
        let labels = if self.labels.is_empty() {
            default_labels(n)
        } else {
            if self.labels.len() != n {
                return Err(Error::LabelCount {
                    labels: self.labels.len(),
                    side: n,
                });
            }
            let mut seen = HashSet::new();
            for l in &self.labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
            self.labels.clone()
        };
        Ok(SpaceData {
            labels,
            matrix: self.matrix.clone(),
        })
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Zero diagonal (exact), symmetry (within `tol`) and strictly positive
/// off-diagonal entries (exact). The witness names the first violating entry
/// in row-major order.
pub fn check_distance_axioms<T: Scalar>(data: &SpaceData<T>, tol: Tol<T>) -> Result<Verdict<T>> {
    let data = data.normalized()?;
    Ok(Verdict::from_witness(first_axiom_violation(&data.labels, &data.matrix, tol)))
}

fn first_axiom_violation<T: Scalar>(labels: &[String], d: &[Vec<T>], tol: Tol<T>) -> Option<Witness<T>> {
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                if d[i][i] != T::zero() {
                    return Some(
                        Witness::new(WitnessKind::Diagonal, "d(x,x) = 0", Cmp::Eq, d[i][i], T::zero(), Tol::exact())
                            .at_points([labels[i].clone(), labels[i].clone()]),
                    );
                }
                continue;
            }
            if d[i][j] <= T::zero() {
                return Some(
                    Witness::new(WitnessKind::Positivity, "d(x,y) > 0", Cmp::Gt, d[i][j], T::zero(), Tol::exact())
                        .at_points([labels[i].clone(), labels[j].clone()]),
                );
            }
            if i < j && !tol.eq(d[i][j], d[j][i]) {
                return Some(
                    Witness::new(WitnessKind::Symmetry, "d(x,y) = d(y,x)", Cmp::Eq, d[i][j], d[j][i], tol)
                        .at_points([labels[i].clone(), labels[j].clone()]),
                );
            }
        }
    }
    None
}

/// A validated finite distance space. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSpace<T> {
    labels: Vec<String>,
    matrix: Vec<Vec<T>>,
}

impl<T: Scalar> DistanceSpace<T> {
    pub fn new(data: SpaceData<T>, tol: Tol<T>) -> Result<Self> {
        let data = data.normalized()?;
        if let Some(w) = first_axiom_violation(&data.labels, &data.matrix, tol) {
            return Err(Error::AxiomViolation(Box::new(w.to_f64())));
        }
        Ok(DistanceSpace {
            labels: data.labels,
            matrix: data.matrix,
        })
    }

    /// Default labels and tolerance.
    pub fn from_matrix(matrix: Vec<Vec<T>>) -> Result<Self> {
        Self::new(SpaceData::from_matrix(matrix), Tol::default())
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.matrix[i][j]
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn to_data(&self) -> SpaceData<T> {
        SpaceData {
            labels: self.labels.clone(),
            matrix: self.matrix.clone(),
        }
    }

    pub fn max_distance(&self) -> T {
        self.matrix
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &v| acc.max(v))
    }

    /// Sorted distinct off-diagonal values.
    pub fn distinct_distances(&self) -> Vec<T> {
        let mut vals: Vec<T> = Vec::new();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                vals.push(self.matrix[i][j]);
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        vals.dedup();
        vals
    }

    /// All distances multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: T) -> Self {
        DistanceSpace {
            labels: self.labels.clone(),
            matrix: self
                .matrix
                .iter()
                .map(|r| r.iter().map(|&v| v * lambda).collect())
                .collect(),
        }
    }

    /// The subspace on the given point indices, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        DistanceSpace {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            matrix: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.matrix[i][j]).collect())
                .collect(),
        }
    }
}

/// Samples an analytic distance: `d[i][j] = formula(points[i], points[j])`.
/// Labels are the points' decimal renderings.
pub fn space_from_points<T: Scalar>(points: &[T], formula: &BinaryFn, tol: Tol<T>) -> Result<DistanceSpace<T>> {
    if points.is_empty() {
        return Err(Error::EmptySpace);
    }
    for (i, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidParameter(format!("point {i} is not finite")));
        }
        if points[..i].iter().any(|q| q == p) {
            return Err(Error::DuplicatePoint(p.to_string()));
        }
    }
    let mut matrix = Vec::with_capacity(points.len());
    for &x in points {
        let mut row = Vec::with_capacity(points.len());
        for &y in points {
            row.push(formula.eval(x, y)?);
        }
        matrix.push(row);
    }
    let labels = points.iter().map(|p| p.to_string()).collect();
    DistanceSpace::new(SpaceData::new(labels, matrix), tol)
}

/// Distance trace `D(a_n, ·)` for `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSequence<T> {
    name: String,
    values: Vec<T>,
}

impl<T: Scalar> SampledSequence<T> {
    pub fn new(name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidParameter(format!("sequence {name} is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "sequence {name} has an invalid value at n={}",
                i + 1
            )));
        }
        Ok(SampledSequence { name, values })
    }

    /// Samples `g(n)` for `n = 1..=len`.
    pub fn from_fn(name: impl Into<String>, len: usize, g: impl Fn(usize) -> T) -> Result<Self> {
        Self::new(name, (1..=len).map(g).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
