//! The experiment pipelines. Each returns its reports, a JSON summary and
//! any notices about checks that were skipped.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::bottleneck::{bottleneck_all, space_distances, BottleneckSummary};
use crate::decomposition::{h_profile, max_ratio, optimal_decomposition, Decomposition, DecompositionSummary};
use crate::dimred::{
    bilipschitz_bounds, bilipschitz_profile, distortion, jl_bounds_with, jl_project_with, mmds_bounds,
    mmds_embed, EpsilonSource, SquaredDistances,
};
use crate::error::{Error, Result};
use crate::generators::{gaussian_cloud, generate, perturb, GeneratorSpec, NoiseModel};
use crate::harness::config::{ExperimentConfig, Pipeline};
use crate::io::{read_any, InputFile};
use crate::metric::{diam, distance_matrix, DistanceMatrix, PointCloud};
use crate::persistence::{diagram, scale_diagram, PersistenceDiagram};
use crate::report::{real_json, BoundReport};
use crate::vr::{build_vr, MAX_SUPPORTED_DIM};

/// Reference magnitudes for a saddle boundary reduced to the plane.
pub const REFERENCE_SCALE: f64 = 26.0;
pub const REFERENCE_DB: f64 = 2.2;
pub const REFERENCE_DN: f64 = 0.012;

/// Relative tolerance for identities that hold exactly in real arithmetic.
const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Samples used to witness optimality of a decomposition on a grid.
const OPTIMALITY_GRID: usize = 2000;

#[derive(Debug, Default)]
pub struct PipelineOutput {
    pub reports: Vec<BoundReport>,
    pub summary: Map<String, Value>,
    pub notices: Vec<String>,
    pub seeds: Vec<u64>,
    /// Input files, hashed into the inputs digest.
    pub files: Vec<std::path::PathBuf>,
}

pub fn run_pipeline(config: &ExperimentConfig) -> Result<PipelineOutput> {
    match config.pipeline {
        Pipeline::Fig1 => fig1(config),
        Pipeline::Jl => jl(config),
        Pipeline::Mmds => mmds(config),
        Pipeline::Bilip => bilip(config),
        Pipeline::Ingest => ingest(config),
    }
}

fn max_dim(config: &ExperimentConfig, default: usize) -> Result<usize> {
    let d = config.count("max_dim", default, 1)?;
    if d > MAX_SUPPORTED_DIM {
        return Err(config.error(
            "max_dim",
            format!("at most {MAX_SUPPORTED_DIM} is supported, got {d}"),
        ));
    }
    Ok(d)
}

fn summary_json(s: &BottleneckSummary) -> Value {
    let per_dim: Map<String, Value> = s
        .per_dim
        .iter()
        .map(|(k, &v)| (format!("H{k}"), real_json(v)))
        .collect();
    json!({ "per_dim": per_dim, "max": real_json(s.max), "argmax_dim": s.argmax_dim })
}

fn seeded(reports: Vec<BoundReport>, seed: u64) -> impl Iterator<Item = BoundReport> {
    reports.into_iter().map(move |r| r.with_seed(seed))
}

/// Loads a cloud or matrix file as a metric space.
fn load_space(config: &ExperimentConfig, key: &str, path: &Path) -> Result<(DistanceMatrix, Option<PointCloud>)> {
    match read_any(path)? {
        InputFile::Cloud(c) => Ok((distance_matrix(&c), Some(c))),
        InputFile::Matrix(d) => Ok((d, None)),
        InputFile::Diagram(_) => Err(config.error(key, "expected a point cloud or distance matrix, found a diagram")),
    }
}

fn load_cloud(config: &ExperimentConfig, key: &str, path: &Path) -> Result<PointCloud> {
    match read_any(path)? {
        InputFile::Cloud(c) => Ok(c),
        other => Err(config.error(key, format!("expected a point cloud, found a {}", other.kind()))),
    }
}

/// Generator shared by the mmds and bilip pipelines.
fn generated_cloud(config: &ExperimentConfig, seed: u64) -> Result<PointCloud> {
    let n = config.count("n", 30, 3)?;
    let radius = config.positive("radius", 1.0)?;
    let sigma = config.nonnegative("sigma", 0.05)?;
    match config.get_str("generator").unwrap_or("saddle") {
        "saddle" => {
            let height = config.nonnegative("height", 1.0)?;
            generate(&GeneratorSpec::saddle(n, radius, height, sigma, seed))
        }
        "circle" => generate(&GeneratorSpec {
            noise: NoiseModel::Isotropic,
            ..GeneratorSpec::noisy_circle(n, radius, sigma, seed)
        }),
        "gaussian" => {
            let dim = 3;
            gaussian_cloud(n, dim, seed)
        }
        other => Err(config.error(
            "generator",
            format!("unknown generator {other:?}; expected saddle, circle or gaussian"),
        )),
    }
}

/// `d_B ≤ dis` for the index correspondence, per dimension.
fn distortion_reports(db: &BottleneckSummary, dis: f64) -> Vec<BoundReport> {
    db.per_dim
        .iter()
        .map(|(k, &v)| BoundReport::new(format!("db_distortion[H{k}]"), v, dis))
        .collect()
}

/// Grid witness of global optimality and the Lipschitz modulus of `h`.
fn decomposition_reports(dx: &DistanceMatrix, dy: &DistanceMatrix, dec: &Decomposition) -> Result<Vec<BoundReport>> {
    let s_max = 2.0 * max_ratio(dx, dy)?.max(dec.s_star);
    let profile = h_profile(dx, dy, s_max, OPTIMALITY_GRID)?;
    let grid_min = profile.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let step = s_max / OPTIMALITY_GRID as f64;
    let worst_jump = profile
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs())
        .fold(0.0f64, f64::max);
    Ok(vec![
        BoundReport::new("decomposition_optimality", dec.delta_norm, grid_min)
            .with_note(format!("grid of {} points on [0, {s_max}]", OPTIMALITY_GRID + 1)),
        BoundReport::new("h_lipschitz", worst_jump, step * diam(dx)?),
    ])
}

fn fig1(config: &ExperimentConfig) -> Result<PipelineOutput> {
    let seed: u64 = config.get("seed", 0)?;
    let max_dim = max_dim(config, 2)?;
    let n = config.count("n", 50, 3)?;
    let radius = config.positive("radius", 10.0)?;
    let sigma = config.nonnegative("sigma", 0.5)?;
    let box_half = config.positive("box", 10.0)?;
    let scale = config.positive("scale", 8.0)?;
    let large_radius = config.positive("large_radius", 40.0)?;
    let large_box = config.positive("large_box", 80.0)?;
    let tau_n = config.positive("tau_n", 0.25)?;
    let tau_b = config.positive("tau_b", 5.0)?;
    let birth_small = config.range("birth_small", (4.0, 10.0))?;
    let birth_large = config.range("birth_large", (16.0, 36.0))?;
    for (key, r, b) in [("radius", radius, box_half), ("large_radius", large_radius, large_box)] {
        if r > b {
            return Err(config.error(key, format!("radius {r} exceeds the box half-width {b}")));
        }
    }

    let circle = |r: f64, b: f64, s: u64| {
        generate(&GeneratorSpec {
            box_halfwidth: b,
            ..GeneratorSpec::noisy_circle(n, r, sigma, s)
        })
    };
    let a = circle(radius, box_half, seed)?;
    let b = circle(radius, box_half, seed + 1)?;
    let c = circle(radius * scale, box_half * scale, seed + 2)?;
    let large = circle(large_radius, large_box, seed + 3)?;
    let (da, db_, dc, dl) = (
        distance_matrix(&a),
        distance_matrix(&b),
        distance_matrix(&c),
        distance_matrix(&large),
    );

    let (same_b, same_n) = space_distances(&da, &db_, max_dim)?;
    let (scaled_b, scaled_n) = space_distances(&da, &dc, max_dim)?;
    let h1 = |s: &BottleneckSummary| s.get(1).unwrap_or(0.0);

    let mut reports = vec![
        BoundReport::new("fig1_db_same[H1]", h1(&same_b), tau_b),
        BoundReport::new("fig1_dn_same[H1]", h1(&same_n), tau_n),
        BoundReport::new("fig1_dn_scaled[H1]", h1(&scaled_n), tau_n),
        BoundReport::new("fig1_db_scaled[H1]", tau_b, h1(&scaled_b))
            .with_note("threshold on the left: the scaled pair must be far apart"),
    ];

    let ga = diagram(&da, max_dim)?;
    let gl = diagram(&dl, max_dim)?;
    let dominant_birth = |g: &PersistenceDiagram, which: &str| {
        g.most_persistent(1)
            .map(|p| p.birth)
            .ok_or_else(|| Error::InvalidParameter(format!("{which} circle has no 1-cycle")))
    };
    let (b_small, b_large) = (dominant_birth(&ga, "small")?, dominant_birth(&gl, "large")?);
    reports.extend([
        BoundReport::new("fig1_birth_small_lower", birth_small.0, b_small),
        BoundReport::new("fig1_birth_small_upper", b_small, birth_small.1),
        BoundReport::new("fig1_birth_large_lower", birth_large.0, b_large),
        BoundReport::new("fig1_birth_large_upper", b_large, birth_large.1),
    ]);

    // scaling identities on the first circle, with the configured factor
    let sa = a.scaled(scale)?;
    let dsa = distance_matrix(&sa);
    let (diam_a, diam_sa) = (diam(&da)?, diam(&dsa)?);
    let tol = IDENTITY_TOLERANCE * scale * diam_a;
    reports.push(BoundReport::new("diam_scaling", (diam_sa - scale * diam_a).abs(), tol));

    let (ka, ksa) = (build_vr(&da, max_dim)?, build_vr(&dsa, max_dim)?);
    let mut vr_gap = 0.0f64;
    for s in ka.simplices() {
        let pos = ksa.position_of(s.vertices()).expect("same vertex set");
        vr_gap = vr_gap.max((ksa.simplices()[pos].value() - scale * s.value()).abs());
    }
    reports.push(BoundReport::new("vr_scaling", vr_gap, tol));

    let gsa = diagram(&dsa, max_dim)?;
    let dgm_gap = bottleneck_all(&scale_diagram(&ga, scale)?, &gsa);
    reports.extend(
        dgm_gap
            .per_dim
            .iter()
            .map(|(k, &v)| BoundReport::new(format!("dgm_scaling[H{k}]"), v, tol)),
    );

    let sb = b.scaled(scale)?;
    let (sb_db, sb_dn) = space_distances(&dsa, &distance_matrix(&sb), max_dim)?;
    for (k, &v) in &sb_db.per_dim {
        let base = same_b.get(*k).unwrap_or(0.0);
        reports.push(BoundReport::new(format!("db_scaling[H{k}]"), (v - scale * base).abs(), tol));
    }
    for (k, &v) in &sb_dn.per_dim {
        let base = same_n.get(*k).unwrap_or(0.0);
        reports.push(BoundReport::new(
            format!("dn_scale_invariance[H{k}]"),
            (v - base).abs(),
            IDENTITY_TOLERANCE,
        ));
    }

    let mut pers: Vec<f64> = ga.dim(1).iter().map(|p| p.persistence()).collect();
    pers.sort_by(|x, y| y.total_cmp(x));
    let dominance = match pers.as_slice() {
        [first, second, ..] => first / second,
        _ => f64::INFINITY,
    };

    let mut summary = Map::new();
    summary.insert("birth_small".into(), json!(b_small));
    summary.insert("birth_large".into(), json!(b_large));
    summary.insert("h1_dominance".into(), real_json(dominance));
    summary.insert("db_same".into(), summary_json(&same_b));
    summary.insert("dn_same".into(), summary_json(&same_n));
    summary.insert("db_scaled".into(), summary_json(&scaled_b));
    summary.insert("dn_scaled".into(), summary_json(&scaled_n));
    summary.insert("dn_ratio_scaled_to_same".into(), real_json(h1(&scaled_n) / h1(&same_n)));

    Ok(PipelineOutput {
        reports,
        summary,
        notices: vec![
            "reference magnitudes for the reduced saddle boundary (s ≈ 26, d_B ≈ 2.2, d_N ≈ 0.012) \
             need the original reduced coordinates; run the ingest pipeline with reference = true on them"
                .into(),
        ],
        seeds: vec![seed, seed + 1, seed + 2, seed + 3],
        files: Vec::new(),
    })
}

fn jl(config: &ExperimentConfig) -> Result<PipelineOutput> {
    let seeds = config.seeds("seeds", &(0..10).collect::<Vec<_>>())?;
    let max_dim = max_dim(config, 1)?;
    let epsilon = config.get_real("epsilon", 0.5, "in (0, 1)", |e| e > 0.0 && e < 1.0)?;
    let source = match config.get_str("epsilon_source").unwrap_or("measured") {
        "measured" => EpsilonSource::Measured,
        "target" => EpsilonSource::Target,
        other => {
            return Err(config.error(
                "epsilon_source",
                format!("expected measured or target, got {other:?}"),
            ))
        }
    };
    let mut files = Vec::new();
    let cloud = match config.path("input")? {
        Some(p) => {
            let c = load_cloud(config, "input", &p)?;
            files.push(p);
            c
        }
        None => {
            let points = config.count("points", 1000, 2)?;
            let dim = config.count("dim", 2000, 1)?;
            gaussian_cloud(points, dim, config.get("data_seed", 0)?)?
        }
    };

    let squared = SquaredDistances::of(&cloud);
    let dx = squared.distances();
    let mut reports = Vec::new();
    let mut runs = Vec::new();
    let mut best = f64::INFINITY;
    let mut below = 0usize;
    for &seed in &seeds {
        let r = jl_project_with(&cloud, &squared, epsilon, seed)?;
        best = best.min(r.epsilon_actual);
        if r.epsilon_actual < epsilon {
            below += 1;
        }
        reports.extend(seeded(jl_bounds_with(&dx, &r, max_dim, source)?, seed));
        runs.push(json!({
            "seed": seed,
            "epsilon_actual": real_json(r.epsilon_actual),
            "n_target": r.n_target,
            "identity": r.identity,
        }));
    }
    reports.push(
        BoundReport::new("jl_lemma", best, epsilon)
            .with_note("smallest measured epsilon over the seeds: some draw achieves the target"),
    );

    let mut summary = Map::new();
    summary.insert("points".into(), json!(cloud.len()));
    summary.insert("input_dim".into(), json!(cloud.dim()));
    summary.insert("epsilon_target".into(), json!(epsilon));
    summary.insert("epsilon_source".into(), json!(source.name()));
    summary.insert("n_min".into(), json!(crate::dimred::jl_target_dim(cloud.len(), epsilon)));
    summary.insert("seeds_below_target".into(), json!(below));
    summary.insert("runs".into(), Value::Array(runs));
    let mut notices = Vec::new();
    if source == EpsilonSource::Target {
        notices.push(
            "bounds use the target epsilon; a single draw need not achieve it, so failures are possible".into(),
        );
    }
    Ok(PipelineOutput {
        reports,
        summary,
        notices,
        seeds,
        files,
    })
}

fn mmds(config: &ExperimentConfig) -> Result<PipelineOutput> {
    let max_dim = max_dim(config, 2)?;
    let m = config.count("target_dim", 2, 1)?;
    let clamp: bool = config.get("clamp", false)?;
    let mut notices = Vec::new();
    let mut files = Vec::new();

    let inputs: Vec<(u64, DistanceMatrix)> = match config.path("input")? {
        Some(p) => {
            let (d, _) = load_space(config, "input", &p)?;
            files.push(p);
            if config.contains("seeds") {
                notices.push("seeds ignored: the input is read from a file".into());
            }
            vec![(0, d)]
        }
        None => config
            .seeds("seeds", &(0..10).collect::<Vec<_>>())?
            .into_iter()
            .map(|s| Ok((s, distance_matrix(&generated_cloud(config, s)?))))
            .collect::<Result<_>>()?,
    };

    let mut reports = Vec::new();
    let mut runs = Vec::new();
    for (seed, d) in &inputs {
        let r = mmds_embed(d, m, clamp)?;
        reports.extend(seeded(mmds_bounds(d, &r, max_dim)?, *seed));
        runs.push(json!({
            "seed": seed,
            "eigenvalues": r.eigenvalues,
            "rank": r.rank(),
            "clamped_count": r.clamped_count,
            "j_min": r.j_min,
        }));
    }
    let mut summary = Map::new();
    summary.insert("target_dim".into(), json!(m));
    summary.insert("runs".into(), Value::Array(runs));
    Ok(PipelineOutput {
        reports,
        summary,
        notices,
        seeds: inputs.iter().map(|i| i.0).collect(),
        files,
    })
}

/// Everything measured for one index-aligned pair: decomposition of `dy`
/// over `dx`, stability, distortion, and biLipschitz bounds when they apply.
fn pair_reports(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    max_dim: usize,
    notices: &mut Vec<String>,
) -> Result<(Vec<BoundReport>, Map<String, Value>)> {
    let dec = optimal_decomposition(dx, dy)?;
    let (db, dn) = space_distances(dx, dy, max_dim)?;
    let dis = distortion(dx, dy)?;
    let mut reports = vec![BoundReport::new("dn_stability", dn.max, 2.0 * dec.delta_norm / diam(dy)?)];
    reports.extend(decomposition_reports(dx, dy, &dec)?);
    reports.extend(distortion_reports(&db, dis));

    let mut summary = Map::new();
    summary.insert("decomposition".into(), serde_json::to_value(DecompositionSummary::from(&dec)).expect("plain struct"));
    summary.insert("db".into(), summary_json(&db));
    summary.insert("dn".into(), summary_json(&dn));
    summary.insert("distortion".into(), json!(dis));
    if dec.zero_scale {
        notices.push("the optimal scaling is s = 0: the two metrics are anti-correlated".into());
    }
    match bilipschitz_profile(dx, dy) {
        Ok(p) => {
            reports.extend(bilipschitz_bounds(dx, dy, &p, max_dim)?);
            summary.insert("bilipschitz".into(), serde_json::to_value(p).expect("plain struct"));
        }
        Err(Error::NotBiLipschitz(i, j)) => notices.push(format!(
            "biLipschitz bounds skipped: pair ({i}, {j}) is zero on exactly one side"
        )),
        Err(e) => return Err(e),
    }
    Ok((reports, summary))
}

fn bilip(config: &ExperimentConfig) -> Result<PipelineOutput> {
    let max_dim = max_dim(config, 2)?;
    let mut notices = Vec::new();
    let mut files = Vec::new();

    if let Some(reduced) = config.path("reduced")? {
        let input = config
            .path("input")?
            .ok_or_else(|| config.error("reduced", "a reduced file needs an input file too"))?;
        let (dx, _) = load_space(config, "input", &input)?;
        let (dy, _) = load_space(config, "reduced", &reduced)?;
        files.extend([input, reduced]);
        let (reports, summary) = pair_reports(&dx, &dy, max_dim, &mut notices)?;
        return Ok(PipelineOutput {
            reports,
            summary,
            notices,
            seeds: Vec::new(),
            files,
        });
    }

    let eta = config.nonnegative("perturbation", 0.05)?;
    let fixed = match config.path("input")? {
        Some(p) => {
            let c = load_cloud(config, "input", &p)?;
            files.push(p);
            Some(c)
        }
        None => None,
    };
    let seeds = config.seeds("seeds", &(0..10).collect::<Vec<_>>())?;
    let mut reports = Vec::new();
    let mut runs = Vec::new();
    for &seed in &seeds {
        let x = match &fixed {
            Some(c) => c.clone(),
            None => generated_cloud(config, seed)?,
        };
        let dx = distance_matrix(&x);
        // noise scaled to the diameter; odd stream so it differs from the data
        let y = perturb(&x, eta * diam(&dx)?, seed.wrapping_mul(2).wrapping_add(1))?;
        let dy = distance_matrix(&y);
        let (r, mut s) = pair_reports(&dx, &dy, max_dim, &mut notices)?;
        reports.extend(seeded(r, seed));
        s.insert("seed".into(), json!(seed));
        runs.push(Value::Object(s));
    }
    let mut summary = Map::new();
    summary.insert("perturbation".into(), json!(eta));
    summary.insert("runs".into(), Value::Array(runs));
    Ok(PipelineOutput {
        reports,
        summary,
        notices,
        seeds,
        files,
    })
}

fn ingest(config: &ExperimentConfig) -> Result<PipelineOutput> {
    let max_dim = max_dim(config, 2)?;
    let original = config.required_path("original")?;
    let reduced = config.required_path("reduced")?;
    let reference: bool = config.get("reference", false)?;
    let tolerance = config.positive("tolerance", 0.25)?;
    let (d_orig, _) = load_space(config, "original", &original)?;
    let (d_red, _) = load_space(config, "reduced", &reduced)?;
    if d_orig.len() != d_red.len() {
        return Err(Error::SizeMismatch {
            left: d_orig.len(),
            right: d_red.len(),
        });
    }

    let mut notices = Vec::new();
    // the original written as a scaling of the reduction: D_orig = s·D_red + Δ
    let (mut reports, mut summary) = pair_reports(&d_red, &d_orig, max_dim, &mut notices)?;
    let forward = optimal_decomposition(&d_orig, &d_red)?;
    let (db, dn) = space_distances(&d_orig, &d_red, max_dim)?;
    reports.push(BoundReport::new(
        "dn_stability_forward",
        dn.max,
        2.0 * forward.delta_norm / diam(&d_red)?,
    ));
    summary.insert(
        "forward_decomposition".into(),
        serde_json::to_value(DecompositionSummary::from(&forward)).expect("plain struct"),
    );
    summary.insert("comparison_dim".into(), json!(1));

    let s_star = optimal_decomposition(&d_red, &d_orig)?.s_star;
    if reference {
        let db1 = db.get(1).unwrap_or(0.0);
        let dn1 = dn.get(1).unwrap_or(0.0);
        let note = format!("relative tolerance {tolerance}");
        reports.extend([
            BoundReport::new("reference_scale", (s_star - REFERENCE_SCALE).abs(), tolerance * REFERENCE_SCALE)
                .with_note(note.clone()),
            BoundReport::new("reference_db[H1]", (db1 - REFERENCE_DB).abs(), tolerance * REFERENCE_DB)
                .with_note(note.clone()),
            BoundReport::new("reference_dn[H1]", (dn1 - REFERENCE_DN).abs(), tolerance * REFERENCE_DN)
                .with_note(note),
        ]);
    } else {
        notices.push(format!(
            "reference magnitudes (s ≈ {REFERENCE_SCALE}, d_B ≈ {REFERENCE_DB}, d_N ≈ {REFERENCE_DN} in H1) \
             not checked: set reference = true when the inputs are the original saddle-boundary reduction"
        ));
    }
    Ok(PipelineOutput {
        reports,
        summary,
        notices,
        seeds: Vec::new(),
        files: vec![original, reduced],
    })
}
