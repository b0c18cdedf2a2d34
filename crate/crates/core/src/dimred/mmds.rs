//! Metric multidimensional scaling by double centering.
//!
//! The Gram matrix `G = −½·C·D∘²·C` realizes the space when it is positive
//! semidefinite; keeping the top `m` eigenpairs is the orthogonal projection
//! of that realization onto its leading principal axes.

use crate::bottleneck::space_distances;
use crate::decomposition::optimal_decomposition;
use crate::dimred::eigen::{symmetric_eigen, SymmetricEigen};
use crate::dimred::{distortion, per_dim_reports};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{diam, distance_matrix, hadamard_gap_check, DistanceMatrix, PointCloud};
use crate::report::BoundReport;

/// Eigenvalues below this multiple of `λ_max` in magnitude count as zero.
pub const EIGEN_ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MMDSResult {
    pub embedded: PointCloud,
    /// Positive spectrum `λ_1 ≥ … ≥ λ_d > 0` with `d` the realization rank.
    pub eigenvalues: Vec<f64>,
    pub m: usize,
    pub clamped_count: usize,
    /// `Σ_{i>m} λ_i²`.
    pub j_min: f64,
    /// Unclamped decomposition of the Gram matrix.
    pub spectrum: SymmetricEigen,
}

impl MMDSResult {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `(Σ_{i≤m} λ_i², Σ_{i>m} λ_i²)`.
    pub fn split_sums(&self) -> (f64, f64) {
        let sq = |s: &[f64]| s.iter().map(|l| l * l).sum::<f64>();
        (sq(&self.eigenvalues[..self.m]), sq(&self.eigenvalues[self.m..]))
    }
}

/// `−½·C·D∘²·C` with `C = I − 𝟙/n`.
pub fn gram_matrix(d: &DistanceMatrix) -> Matrix {
    let n = d.len();
    let mut sq = Matrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in d.row(i).iter().enumerate() {
            sq[(i, j)] = v * v;
        }
    }
    let row_mean: Vec<f64> = (0..n)
        .map(|i| sq.row(i).iter().sum::<f64>() / n as f64)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + grand);
        }
    }
    g
}

/// Embeds `d` in `ℝ^m`. Negative eigenvalues larger than the zero tolerance
/// are an error unless `clamp` is set, in which case they are zeroed.
pub fn mmds_embed(d: &DistanceMatrix, m: usize, clamp: bool) -> Result<MMDSResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("target dimension must be at least 1".into()));
    }
    diam(d)?;
    let spectrum = symmetric_eigen(&gram_matrix(d))?;
    let lmax = spectrum.values[0];
    let tol = EIGEN_ZERO_TOLERANCE * lmax;

    let mut clamped_count = 0;
    for &l in &spectrum.values {
        if l < 0.0 {
            if -l > tol && !clamp {
                return Err(Error::NonEuclideanInput {
                    eigenvalue: l,
                    tolerance: tol,
                });
            }
            clamped_count += 1;
        }
    }
    let eigenvalues: Vec<f64> = spectrum.values.iter().copied().filter(|&l| l > tol).collect();
    if m > eigenvalues.len() {
        return Err(Error::SizeError {
            requested: m,
            rank: eigenvalues.len(),
        });
    }

    let n = d.len();
    let roots: Vec<f64> = eigenvalues[..m].iter().map(|l| l.sqrt()).collect();
    let points = (0..n)
        .map(|i| {
            roots
                .iter()
                .enumerate()
                .map(|(k, r)| r * spectrum.vectors[(i, k)])
                .collect()
        })
        .collect();
    let j_min = eigenvalues[m..].iter().map(|l| l * l).sum();
    Ok(MMDSResult {
        embedded: PointCloud::new(points)?,
        eigenvalues,
        m,
        clamped_count,
        j_min,
        spectrum,
    })
}

/// Distortion, bottleneck, decomposition and normalized-bottleneck bounds for
/// an embedding, plus the squared-distance gap it rests on.
pub fn mmds_bounds(d: &DistanceMatrix, result: &MMDSResult, max_dim: usize) -> Result<Vec<BoundReport>> {
    let de = distance_matrix(&result.embedded);
    let (s1, s2) = result.split_sums();
    let s = s1 + s2;
    let sqrt2 = std::f64::consts::SQRT_2;
    let dis_bound = sqrt2 * s2.powf(0.25);
    let mixed = (s1 * s2 / s).powf(0.25);

    let mut out = vec![projector_report(d, result)];
    let (gap_sq, sq_gap) = hadamard_gap_check(&d.as_matrix(), &de.as_matrix())?;
    out.push(BoundReport::new("hadamard_lemma", gap_sq, sq_gap));
    out.push(BoundReport::new("mmds_sq_gap", sq_gap, 2.0 * s2.sqrt()));
    out.push(BoundReport::new("mmds_distortion", distortion(d, &de)?, dis_bound));
    let (db, dn) = space_distances(d, &de, max_dim)?;
    out.extend(per_dim_reports("mmds_db", &db, dis_bound));

    let dec = optimal_decomposition(d, &de)?;
    out.push(
        BoundReport::new("mmds_delta", dec.delta_norm, sqrt2 * mixed)
            .with_note(format!("s_star = {}", dec.s_star)),
    );
    out.extend(per_dim_reports(
        "mmds_dn",
        &dn,
        2.0 * sqrt2 * mixed / diam(&de)?,
    ));
    Ok(out)
}

/// The embedding is the realization projected onto the top `m` axes, so its
/// Gram matrix is `G` minus the discarded eigencomponents. Eigenvalues
/// outside the positive spectrum (clamped or numerically zero) widen the
/// allowance by their magnitude.
fn projector_report(d: &DistanceMatrix, result: &MMDSResult) -> BoundReport {
    let g = gram_matrix(d);
    let n = d.len();
    let (values, v) = (&result.spectrum.values, &result.spectrum.vectors);
    let emb = &result.embedded;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let tail: f64 = (result.m..result.rank())
                .map(|k| values[k] * v[(i, k)] * v[(j, k)])
                .sum();
            let head: f64 = emb.point(i).iter().zip(emb.point(j)).map(|(a, b)| a * b).sum();
            worst = worst.max((g[(i, j)] - tail - head).abs());
        }
    }
    let dropped: f64 = values[result.rank()..].iter().map(|l| l.abs()).sum();
    BoundReport::new(
        "mmds_projector",
        worst,
        EIGEN_ZERO_TOLERANCE * g.frobenius_norm() + dropped,
    )
}
