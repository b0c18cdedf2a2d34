use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tdanorm::bottleneck::{bottleneck, BottleneckSummary};
use tdanorm::decomposition::{optimal_decomposition, DecompositionSummary};
use tdanorm::dimred::{self, EpsilonSource};
use tdanorm::generators::{generate, GeneratorSpec};
use tdanorm::harness::{self, ExperimentConfig, EXIT_BOUND_FAILURE, EXIT_ERROR, EXIT_PASS};
use tdanorm::io::{read_any, write_cloud, write_diagram, InputFile};
use tdanorm::metric::{diam, DistanceMatrix, PointCloud};
use tdanorm::persistence::{diagram, normalize_diagram, PersistenceDiagram};
use tdanorm::report::{real_json, BoundReport};

#[derive(Parser)]
#[command(name = "tdanorm", version, about = "Persistence, normalized bottleneck distance and dimension-reduction bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic point cloud.
    Gen(GenArgs),
    /// Vietoris-Rips persistence diagram of a cloud or distance matrix.
    Dgm {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Diagram CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bottleneck distance per homology dimension.
    Bottleneck(PairArgs),
    /// Normalized bottleneck distance per homology dimension.
    Dnorm {
        #[command(flatten)]
        pair: PairArgs,
        /// Diameter of the first space, needed when it is given as a diagram.
        #[arg(long)]
        diam_a: Option<f64>,
        #[arg(long)]
        diam_b: Option<f64>,
    },
    /// Optimal decomposition `D_Y = s·D_X + Δ` and the stability bound.
    Decompose {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Also emit `h(s)` on an even grid of this many steps, endpoints included.
        #[arg(long)]
        profile: Option<usize>,
    },
    /// Gaussian random projection with bound checks.
    Jl {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximal simplex dimension; 1 keeps large clouds within the simplex budget.
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        #[arg(long, value_enum, default_value_t = EpsSource::Measured)]
        epsilon_source: EpsSource,
        /// Projected cloud CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metric MDS embedding with bound checks.
    Mmds {
        input: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Zero small negative eigenvalues instead of rejecting the input.
        #[arg(long)]
        clamp: bool,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// biLipschitz profile of an index-aligned pair with bound checks.
    Bilip {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Run an experiment config and emit its JSON bundle.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    NoisyCircle,
    Saddle,
}

#[derive(Clone, Copy, ValueEnum)]
enum EpsSource {
    Measured,
    Target,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    shape: Shape,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Vertical span of a saddle boundary.
    #[arg(long, default_value_t = 1.0)]
    height: f64,
    /// Half-width of the square the circle is drawn in; defaults to the radius.
    #[arg(long = "box")]
    box_halfwidth: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    out: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Include an optimal matching for every dimension.
    #[arg(long)]
    witness: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn load(path: &Path) -> Result<InputFile> {
    read_any(path).with_context(|| format!("reading {}", path.display()))
}

fn load_space(path: &Path) -> Result<DistanceMatrix> {
    match load(path)?.distances() {
        Some(d) => Ok(d),
        None => bail!("{}: expected a point cloud or distance matrix, found a diagram", path.display()),
    }
}

fn load_cloud(path: &Path) -> Result<PointCloud> {
    match load(path)? {
        InputFile::Cloud(c) => Ok(c),
        other => bail!("{}: expected a point cloud, found a {}", path.display(), other.kind()),
    }
}

/// A diagram read directly, or computed from a space; the diameter comes
/// along when the input is a space.
fn load_diagram(path: &Path, max_dim: usize) -> Result<(PersistenceDiagram, Option<f64>)> {
    match load(path)? {
        InputFile::Diagram(g) => Ok((g, None)),
        other => {
            let d = other.distances().expect("space");
            Ok((diagram(&d, max_dim)?, Some(diam(&d)?)))
        }
    }
}

fn status(reports: &[BoundReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_BOUND_FAILURE
    }
}

fn distances_json(a: &PersistenceDiagram, b: &PersistenceDiagram, witness: bool) -> Value {
    let shared = a.num_dims().min(b.num_dims());
    let mut values = Map::new();
    let mut witnesses = Map::new();
    let mut per_dim = std::collections::BTreeMap::new();
    for k in 0..shared {
        let r = bottleneck(a, b, k);
        values.insert(k.to_string(), real_json(r.value));
        per_dim.insert(k, r.value);
        if witness {
            witnesses.insert(k.to_string(), serde_json::to_value(&r.witness.pairs).expect("json"));
        }
    }
    let (max, argmax) = per_dim
        .iter()
        .fold((0.0f64, None), |(m, a), (&k, &v)| if a.is_none() || v > m { (v, Some(k)) } else { (m, a) });
    let mut out = Map::new();
    out.insert("dims".into(), Value::Object(values));
    out.insert("max".into(), real_json(max));
    out.insert("argmax_dim".into(), json!(argmax));
    if witness {
        out.insert("witness".into(), Value::Object(witnesses));
    }
    Value::Object(out)
}

fn summary_json(s: &BottleneckSummary) -> Value {
    let dims: Map<String, Value> = s.per_dim.iter().map(|(k, &v)| (k.to_string(), real_json(v))).collect();
    json!({ "dims": dims, "max": real_json(s.max), "argmax_dim": s.argmax_dim })
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Gen(g) => {
            let mut spec = match g.shape {
                Shape::NoisyCircle => GeneratorSpec::noisy_circle(g.n, g.radius, g.sigma, g.seed),
                Shape::Saddle => GeneratorSpec::saddle(g.n, g.radius, g.height, g.sigma, g.seed),
            };
            if let Some(b) = g.box_halfwidth {
                spec.box_halfwidth = b;
            }
            write_cloud(&g.out, &generate(&spec)?)?;
            Ok(EXIT_PASS)
        }
        Command::Dgm { input, max_dim, out } => {
            let g = diagram(&load_space(&input)?, max_dim)?;
            match out {
                Some(p) => write_diagram(p, &g)?,
                None => print!("{}", tdanorm::io::format_diagram(&g)),
            }
            Ok(EXIT_PASS)
        }
        Command::Bottleneck(p) => {
            let (a, _) = load_diagram(&p.a, p.max_dim)?;
            let (b, _) = load_diagram(&p.b, p.max_dim)?;
            print(&distances_json(&a, &b, p.witness));
            Ok(EXIT_PASS)
        }
        Command::Dnorm { pair: p, diam_a, diam_b } => {
            let (a, da) = load_diagram(&p.a, p.max_dim)?;
            let (b, db) = load_diagram(&p.b, p.max_dim)?;
            let Some(da) = da.or(diam_a) else {
                bail!("{} is a diagram: pass --diam-a", p.a.display());
            };
            let Some(db) = db.or(diam_b) else {
                bail!("{} is a diagram: pass --diam-b", p.b.display());
            };
            let (a, b) = (normalize_diagram(&a, da)?, normalize_diagram(&b, db)?);
            print(&distances_json(&a, &b, p.witness));
            Ok(EXIT_PASS)
        }
        Command::Decompose { x, y, max_dim, profile } => {
            let (dx, dy) = (load_space(&x)?, load_space(&y)?);
            let mut dec = optimal_decomposition(&dx, &dy)?;
            let bound_rhs = 2.0 * dec.delta_norm / diam(&dy)?;
            let (_, dn) = tdanorm::space_distances(&dx, &dy, max_dim)?;
            let pass = dn.max <= bound_rhs + tdanorm::report::PASS_TOLERANCE;
            let mut out = serde_json::to_value(DecompositionSummary::from(&dec))?;
            out["bound_rhs"] = real_json(bound_rhs);
            out["d_N_per_dim"] = summary_json(&dn)["dims"].clone();
            out["pass"] = json!(pass);
            if let Some(samples) = profile {
                let s_max = 2.0 * tdanorm::decomposition::max_ratio(&dx, &dy)?.max(dec.s_star);
                dec = dec.with_profile(&dx, &dy, s_max, samples)?;
                out["h_profile"] = json!(dec.h_profile);
            }
            print(&out);
            Ok(if pass { EXIT_PASS } else { EXIT_BOUND_FAILURE })
        }
        Command::Jl { input, eps, seed, max_dim, epsilon_source, out } => {
            let cloud = load_cloud(&input)?;
            let r = dimred::jl_project(&cloud, eps, seed)?;
            let source = match epsilon_source {
                EpsSource::Measured => EpsilonSource::Measured,
                EpsSource::Target => EpsilonSource::Target,
            };
            let reports = dimred::jl_bounds(&cloud, &r, max_dim, source)?;
            if let Some(p) = out {
                write_cloud(p, &r.projected)?;
            }
            print(&json!({
                "epsilon_target": r.epsilon_target,
                "epsilon_actual": real_json(r.epsilon_actual),
                "seed": r.seed,
                "n_min": r.n_min,
                "n_target": r.n_target,
                "identity": r.identity,
                "reports": reports,
            }));
            Ok(status(&reports))
        }
        Command::Mmds { input, dim, clamp, max_dim, out } => {
            let d = load_space(&input)?;
            let r = dimred::mmds_embed(&d, dim, clamp)?;
            let reports = dimred::mmds_bounds(&d, &r, max_dim)?;
            if let Some(p) = out {
                write_cloud(p, &r.embedded)?;
            }
            print(&json!({
                "target_dim": r.m,
                "rank": r.rank(),
                "eigenvalues": r.eigenvalues,
                "clamped_count": r.clamped_count,
                "j_min": r.j_min,
                "reports": reports,
            }));
            Ok(status(&reports))
        }
        Command::Bilip { x, y, max_dim } => {
            let (dx, dy) = (load_space(&x)?, load_space(&y)?);
            let profile = dimred::bilipschitz_profile(&dx, &dy)?;
            let reports = dimred::bilipschitz_bounds(&dx, &dy, &profile, max_dim)?;
            print(&json!({ "profile": profile, "reports": reports }));
            Ok(status(&reports))
        }
        Command::Run { config, out } => {
            let config = ExperimentConfig::load(&config)?;
            let bundle = harness::run_suite(&config)?;
            let text = bundle.to_json_string();
            match out {
                Some(p) => std::fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => println!("{text}"),
            }
            for r in bundle.failures() {
                eprintln!("FAIL {}: {} > {}", r.name, r.lhs, r.rhs);
            }
            for n in &bundle.notices {
                eprintln!("note: {n}");
            }
            Ok(bundle.exit_code())
        }
    }
}
