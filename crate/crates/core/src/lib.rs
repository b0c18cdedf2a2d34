//! Vietoris-Rips persistence, classical and normalized bottleneck distances,
//! optimal metric decompositions, and checks of homology-preservation bounds
//! for Johnson-Lindenstrauss projections, metric MDS and biLipschitz maps.

pub mod bottleneck;
pub mod decomposition;
pub mod dimred;
pub mod error;
pub mod generators;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod persistence;
pub mod report;
pub mod vr;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use metric::{
    diam, distance_matrix, hadamard_gap_check, normalize, scale, DistanceMatrix, PointCloud,
    ScaledSpace, Validation,
};
pub use persistence::{diagram, normalize_diagram, persistence, scale_diagram, PersistenceDiagram, PersistencePair};
pub use vr::{build_vr, build_vr_with_budget, FilteredComplex, Simplex};
pub use bottleneck::{
    space_distances,
    bottleneck, bottleneck_all, normalized_bottleneck, space_bottleneck, Bottleneck,
    BottleneckSummary, MatchedPair, Matching,
};
pub use decomposition::{h_eval, optimal_decomposition, stability_bound, Decomposition};
pub use report::BoundReport;
pub use dimred::{
    bilipschitz_bounds, bilipschitz_profile, distortion, jl_bounds, jl_project, mmds_bounds,
    mmds_embed, BiLipschitzProfile, EpsilonSource, JLResult, MMDSResult,
};
pub use generators::{gaussian_cloud, generate, noisy_circle, saddle_boundary, GeneratorSpec};
pub use harness::{run_suite, Bundle, ExperimentConfig, Pipeline};
