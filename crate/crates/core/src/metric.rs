//! Finite metric spaces: point clouds, dense distance matrices and scaling.
//!
//! A [`DistanceMatrix`] is the finite metric space `(X, d)` itself; every
//! other module consumes it. Symmetry is enforced on construction by
//! mirroring the upper triangle, so `d(i, j) == d(j, i)` holds bit-for-bit.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative tolerance for the triangle inequality, scaled by the largest entry.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

/// An ordered list of points in Euclidean space, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCloud(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidCloud("points have dimension 0".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if let Some(v) = p.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has non-finite coordinate {v}"
                )));
            }
        }
        Ok(PointCloud {
            points,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::InvalidCloud(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Builds a cloud from the rows of a matrix.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        PointCloud::new(m.to_rows())
    }

    pub fn to_matrix(&self) -> Matrix {
        let data = self.points.iter().flatten().copied().collect();
        Matrix::from_vec(self.len(), self.dim(), data).expect("cloud is rectangular")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a valid cloud has at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Multiplies every coordinate by `s`.
    pub fn scaled(&self, s: f64) -> Result<PointCloud> {
        check_factor(s)?;
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|v| v * s).collect())
            .collect();
        Ok(PointCloud {
            points,
            labels: self.labels.clone(),
        })
    }
}

/// How much checking to do when a distance matrix is built from raw values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Symmetry, zero diagonal, nonnegativity only.
    #[default]
    Basic,
    /// Also require the triangle inequality; violations are errors.
    Strict,
    /// Check the triangle inequality but only log warnings (external files).
    Ingest,
}

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows, mirroring the upper triangle into the lower one.
    ///
    /// Lower-triangle entries that differ from their mirror by more than
    /// `1e-9 * max entry` are rejected as asymmetric.
    pub fn from_rows(rows: &[Vec<f64>], validation: Validation) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        DistanceMatrix::from_flat(n, entries, validation)
    }

    /// Row-major flat storage; same checks as [`DistanceMatrix::from_rows`].
    pub fn from_flat(n: usize, mut entries: Vec<f64>, validation: Validation) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} values for a {n}x{n} matrix",
                entries.len()
            )));
        }
        let mut max = 0.0f64;
        for (k, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!(
                    "non-finite entry at ({}, {})",
                    k / n,
                    k % n
                )));
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row: k / n,
                    col: k % n,
                    value: v,
                });
            }
            max = max.max(v);
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "nonzero diagonal entry {} at ({i}, {i})",
                    entries[i * n + i]
                )));
            }
        }
        let tol = TRIANGLE_TOLERANCE * max;
        for i in 0..n {
            for j in (i + 1)..n {
                let upper = entries[i * n + j];
                let lower = entries[j * n + i];
                if (upper - lower).abs() > tol {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entries at ({i}, {j}): {upper} vs {lower}"
                    )));
                }
                entries[j * n + i] = upper;
            }
        }
        let d = DistanceMatrix { n, entries };
        match validation {
            Validation::Basic => {}
            Validation::Strict => {
                if let Some((i, j, k)) = d.triangle_violations().into_iter().next() {
                    return Err(Error::InvalidMatrix(format!(
                        "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
                    )));
                }
            }
            Validation::Ingest => {
                let violations = d.triangle_violations();
                if !violations.is_empty() {
                    log::warn!(
                        "distance matrix violates the triangle inequality in {} triples; \
                         continuing in ingest mode",
                        violations.len()
                    );
                }
            }
        }
        Ok(d)
    }

    /// Euclidean distances between the points of a cloud.
    pub fn from_cloud(cloud: &PointCloud) -> DistanceMatrix {
        let n = cloud.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let pi = cloud.point(i);
            for j in (i + 1)..n {
                let d = euclidean(pi, cloud.point(j));
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix { n, entries }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_vec(self.n, self.n, self.entries.clone()).expect("square storage")
    }

    /// Iterates `(i, j, d(i, j))` over the strict upper triangle.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Largest entry; zero for a trivial space.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k) + 1e-9 * max`.
    pub fn triangle_violations(&self) -> Vec<(usize, usize, usize)> {
        let tol = TRIANGLE_TOLERANCE * self.max_entry();
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                let direct = self.get(i, k);
                for j in 0..n {
                    if j != i && j != k && direct > self.get(i, j) + self.get(j, k) + tol {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    pub fn diam(&self) -> Result<f64> {
        diam(self)
    }
}

/// A distance matrix together with a positive scaling factor, evaluated lazily.
#[derive(Debug, Clone)]
pub struct ScaledSpace<'a> {
    base: &'a DistanceMatrix,
    factor: f64,
}

impl<'a> ScaledSpace<'a> {
    pub fn new(base: &'a DistanceMatrix, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        Ok(ScaledSpace { base, factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn base(&self) -> &DistanceMatrix {
        self.base
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.factor * self.base.get(i, j)
    }

    pub fn materialize(&self) -> DistanceMatrix {
        scale_unchecked(self.base, self.factor)
    }
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    DistanceMatrix::from_cloud(cloud)
}

/// Largest pairwise distance. Errors on a trivial (all-zero) space.
pub fn diam(d: &DistanceMatrix) -> Result<f64> {
    let m = d.max_entry();
    if m > 0.0 {
        Ok(m)
    } else {
        Err(Error::TrivialSpace)
    }
}

fn check_factor(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveFactor(s))
    }
}

fn scale_unchecked(d: &DistanceMatrix, s: f64) -> DistanceMatrix {
    DistanceMatrix {
        n: d.n,
        entries: d.entries.iter().map(|v| v * s).collect(),
    }
}

/// The space `sX`: every distance multiplied by `s > 0`.
pub fn scale(d: &DistanceMatrix, s: f64) -> Result<DistanceMatrix> {
    check_factor(s)?;
    Ok(scale_unchecked(d, s))
}

/// `X / diam(X)`. Entries are divided (not multiplied by a reciprocal) so the
/// maximal entry becomes exactly 1.
pub fn normalize(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    let m = diam(d)?;
    Ok(DistanceMatrix {
        n: d.n,
        entries: d.entries.iter().map(|v| v / m).collect(),
    })
}

/// Returns `(‖A − B‖∞², ‖A∘² − B∘²‖∞)` for nonnegative matrices of equal shape.
/// The first never exceeds the second.
pub fn hadamard_gap_check(a: &Matrix, b: &Matrix) -> Result<(f64, f64)> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    for m in [a, b] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v < 0.0 || v.is_nan() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
    }
    let mut gap = 0.0f64;
    let mut sq_gap = 0.0f64;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        gap = gap.max((x - y).abs());
        sq_gap = sq_gap.max((x * x - y * y).abs());
    }
    Ok((gap * gap, sq_gap))
}
