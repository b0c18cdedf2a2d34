//! Gaussian Johnson-Lindenstrauss projections.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::bottleneck::space_distances;
use crate::dimred::{distortion, per_dim_reports};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{diam, distance_matrix, squared_euclidean, DistanceMatrix, PointCloud, Validation};
use crate::report::{serialize_real, BoundReport};

#[derive(Debug, Clone, Serialize)]
pub struct JLResult {
    #[serde(skip)]
    pub projected: PointCloud,
    pub epsilon_target: f64,
    /// `max |‖f(u)−f(v)‖² / ‖u−v‖² − 1|` over distinct pairs.
    #[serde(serialize_with = "serialize_real")]
    pub epsilon_actual: f64,
    pub seed: u64,
    pub n_min: usize,
    pub n_target: usize,
    /// True when no reduction was possible and the map is the identity.
    pub identity: bool,
}

/// Which `ε` the homology bounds are evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonSource {
    /// The distortion actually achieved by the draw.
    #[default]
    Measured,
    /// The requested `ε`; a single draw need not achieve it.
    Target,
}

impl EpsilonSource {
    pub fn name(self) -> &'static str {
        match self {
            EpsilonSource::Measured => "measured",
            EpsilonSource::Target => "target",
        }
    }
}

/// `⌈8·ln(m) / ε²⌉`.
pub fn jl_target_dim(m: usize, epsilon: f64) -> usize {
    (8.0 * (m as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

/// Squared pairwise distances of a cloud, computed once and shared across
/// projections of the same input.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistances {
    n: usize,
    values: Vec<f64>,
}

impl SquaredDistances {
    pub fn of(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = squared_euclidean(cloud.point(i), cloud.point(j));
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        SquaredDistances { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Euclidean distances; identical to [`distance_matrix`] of the cloud.
    pub fn distances(&self) -> DistanceMatrix {
        DistanceMatrix::from_flat(
            self.n,
            self.values.iter().map(|v| v.sqrt()).collect(),
            Validation::Basic,
        )
        .expect("squared distances of a point cloud form a metric")
    }
}

/// Worst relative change of squared distances, over pairs distinct in `a`.
pub fn squared_ratio_epsilon(a: &SquaredDistances, b: &SquaredDistances) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut eps = 0.0f64;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let d2 = a.get(i, j);
            if d2 > 0.0 {
                eps = eps.max((b.get(i, j) / d2 - 1.0).abs());
            }
        }
    }
    Ok(eps)
}

/// Projects onto `max(⌈8·ln(m)/ε²⌉, 1)` dimensions with i.i.d. `N(0, 1/n)`
/// entries. When that is not below the input dimension the cloud is returned
/// unchanged.
pub fn jl_project(cloud: &PointCloud, epsilon: f64, seed: u64) -> Result<JLResult> {
    jl_project_with(cloud, &SquaredDistances::of(cloud), epsilon, seed)
}

/// [`jl_project`] with the input's squared distances precomputed.
pub fn jl_project_with(
    cloud: &PointCloud,
    original: &SquaredDistances,
    epsilon: f64,
    seed: u64,
) -> Result<JLResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if original.len() != cloud.len() {
        return Err(Error::SizeMismatch {
            left: cloud.len(),
            right: original.len(),
        });
    }
    let first = cloud.point(0);
    if cloud.points().iter().all(|p| p == first) {
        return Err(Error::DuplicateOnlyCloud);
    }
    let n_min = jl_target_dim(cloud.len(), epsilon);
    let n = n_min.max(1);
    if n >= cloud.dim() {
        return Ok(JLResult {
            projected: cloud.clone(),
            epsilon_target: epsilon,
            epsilon_actual: 0.0,
            seed,
            n_min,
            n_target: cloud.dim(),
            identity: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = (0..cloud.dim() * n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    let r = Matrix::from_vec(cloud.dim(), n, data)?;
    let projected = PointCloud::from_matrix(&cloud.to_matrix().matmul(&r)?)?;
    let epsilon_actual = squared_ratio_epsilon(original, &SquaredDistances::of(&projected))?;
    Ok(JLResult {
        projected,
        epsilon_target: epsilon,
        epsilon_actual,
        seed,
        n_min,
        n_target: n,
        identity: false,
    })
}

/// Distortion, bottleneck and normalized-bottleneck bounds of a projection.
pub fn jl_bounds(
    cloud: &PointCloud,
    result: &JLResult,
    max_dim: usize,
    source: EpsilonSource,
) -> Result<Vec<BoundReport>> {
    jl_bounds_with(&distance_matrix(cloud), result, max_dim, source)
}

/// [`jl_bounds`] with the input's distance matrix precomputed.
pub fn jl_bounds_with(
    dx: &DistanceMatrix,
    result: &JLResult,
    max_dim: usize,
    source: EpsilonSource,
) -> Result<Vec<BoundReport>> {
    let eps = match source {
        EpsilonSource::Measured => result.epsilon_actual,
        EpsilonSource::Target => result.epsilon_target,
    };
    let note = format!("epsilon = {eps} ({})", source.name());
    let dy = distance_matrix(&result.projected);
    let dx_diam = diam(dx)?;
    let (db, dn) = space_distances(dx, &dy, max_dim)?;

    let mut out = vec![BoundReport::new("jl_distortion", distortion(dx, &dy)?, eps * dx_diam)];
    out.extend(per_dim_reports("jl_db", &db, eps * dx_diam));
    out.extend(per_dim_reports("jl_dn", &dn, eps));
    Ok(out.into_iter().map(|r| r.with_note(note.clone())).collect())
}
