//! Dimension reductions and the bounds they satisfy: Johnson-Lindenstrauss
//! projections, metric MDS, and arbitrary biLipschitz correspondences.

pub mod bilipschitz;
pub mod eigen;
pub mod jl;
pub mod mmds;

pub use bilipschitz::{bilipschitz_bounds, bilipschitz_profile, BiLipschitzProfile};
pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use jl::{
    jl_bounds, jl_bounds_with, jl_project, jl_project_with, jl_target_dim, squared_ratio_epsilon,
    EpsilonSource, JLResult, SquaredDistances,
};
pub use mmds::{gram_matrix, mmds_bounds, mmds_embed, MMDSResult};

use crate::bottleneck::BottleneckSummary;
use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::report::BoundReport;

/// `dis(f) = max_{ij} |D_X[i][j] − D_Y[i][j]|` for the index correspondence.
pub fn distortion(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    if dx.len() != dy.len() {
        return Err(Error::SizeMismatch {
            left: dx.len(),
            right: dy.len(),
        });
    }
    Ok(dx
        .upper_pairs()
        .fold(0.0f64, |m, (i, j, x)| m.max((x - dy.get(i, j)).abs())))
}

/// One report per homology dimension, named `prefix[Hk]`.
pub(crate) fn per_dim_reports(prefix: &str, lhs: &BottleneckSummary, rhs: f64) -> Vec<BoundReport> {
    lhs.per_dim
        .iter()
        .map(|(k, &v)| BoundReport::new(format!("{prefix}[H{k}]"), v, rhs))
        .collect()
}
