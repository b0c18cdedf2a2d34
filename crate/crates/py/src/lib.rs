//! Python bindings: spaces, diagrams, distances, decompositions and the
//! dimension-reduction bound checks.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use tdanorm::bottleneck::{bottleneck_all, BottleneckSummary};
use tdanorm::dimred::{self, EpsilonSource};
use tdanorm::generators::{self, GeneratorSpec};
use tdanorm::metric::{self, PointCloud, Validation};
use tdanorm::persistence::{self, PersistencePair};

fn py_err(e: tdanorm::Error) -> PyErr {
    match e {
        tdanorm::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for tdanorm::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A finite metric space given by its distance matrix.
#[pyclass(module = "pytdanorm", frozen)]
struct Space {
    inner: metric::DistanceMatrix,
}

#[pymethods]
impl Space {
    /// Euclidean distances between the rows of `points`.
    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let cloud = PointCloud::new(points).py()?;
        Ok(Space {
            inner: metric::distance_matrix(&cloud),
        })
    }

    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Space {
            inner: metric::DistanceMatrix::from_rows(&rows, Validation::Ingest).py()?,
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        match tdanorm::io::read_any(path).py()?.distances() {
            Some(inner) => Ok(Space { inner }),
            None => Err(PyValueError::new_err(format!("{path} holds a diagram"))),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn diam(&self) -> PyResult<f64> {
        metric::diam(&self.inner).py()
    }

    fn scaled(&self, s: f64) -> PyResult<Self> {
        Ok(Space {
            inner: metric::scale(&self.inner, s).py()?,
        })
    }

    fn normalized(&self) -> PyResult<Self> {
        Ok(Space {
            inner: metric::normalize(&self.inner).py()?,
        })
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner.to_rows()
    }

    #[pyo3(signature = (max_dim = 2))]
    fn diagram(&self, max_dim: usize) -> PyResult<Diagram> {
        Ok(Diagram {
            inner: persistence::diagram(&self.inner, max_dim).py()?,
        })
    }
}

#[pyclass(module = "pytdanorm", frozen)]
struct Diagram {
    inner: persistence::PersistenceDiagram,
}

#[pymethods]
impl Diagram {
    /// Builds a diagram from `(dim, birth, death)` triples.
    #[new]
    fn new(rows: Vec<(usize, f64, f64)>) -> PyResult<Self> {
        let mut dims: Vec<Vec<PersistencePair>> = Vec::new();
        for (k, b, d) in rows {
            if dims.len() <= k {
                dims.resize(k + 1, Vec::new());
            }
            dims[k].push(PersistencePair::new(b, d));
        }
        Ok(Diagram {
            inner: persistence::PersistenceDiagram::from_dims(dims).py()?,
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(Diagram {
            inner: tdanorm::io::read_diagram(path).py()?,
        })
    }

    fn num_dims(&self) -> usize {
        self.inner.num_dims()
    }

    /// `(birth, death)` pairs in dimension `k`; essential classes have `inf` death.
    fn pairs(&self, k: usize) -> Vec<(f64, f64)> {
        self.inner.dim(k).iter().map(|p| (p.birth, p.death)).collect()
    }

    fn rows(&self) -> Vec<(usize, f64, f64)> {
        self.inner.rows().map(|(k, p)| (k, p.birth, p.death)).collect()
    }

    fn scaled(&self, s: f64) -> PyResult<Self> {
        Ok(Diagram {
            inner: persistence::scale_diagram(&self.inner, s).py()?,
        })
    }

    fn to_csv(&self) -> String {
        tdanorm::io::format_diagram(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.total_pairs()
    }
}

/// Per-dimension distances plus their maximum.
#[pyclass(module = "pytdanorm", frozen, get_all)]
struct Distances {
    per_dim: Vec<(usize, f64)>,
    max: f64,
    argmax_dim: Option<usize>,
}

impl From<BottleneckSummary> for Distances {
    fn from(s: BottleneckSummary) -> Self {
        Distances {
            per_dim: s.per_dim.into_iter().collect(),
            max: s.max,
            argmax_dim: s.argmax_dim,
        }
    }
}

#[pymethods]
impl Distances {
    fn get(&self, k: usize) -> Option<f64> {
        self.per_dim.iter().find(|e| e.0 == k).map(|e| e.1)
    }

    fn __repr__(&self) -> String {
        format!("Distances(per_dim={:?}, max={})", self.per_dim, self.max)
    }
}

#[pyclass(module = "pytdanorm", frozen, get_all)]
struct BoundReport {
    name: String,
    lhs: f64,
    rhs: f64,
    slack: f64,
    passed: bool,
    seed: Option<u64>,
    note: Option<String>,
}

#[pymethods]
impl BoundReport {
    fn __repr__(&self) -> String {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        format!("{}: {} <= {} [{verdict}]", self.name, self.lhs, self.rhs)
    }
}

fn reports(r: Vec<tdanorm::BoundReport>) -> Vec<BoundReport> {
    r.into_iter()
        .map(|r| BoundReport {
            name: r.name,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            passed: r.pass,
            seed: r.seed,
            note: r.note,
        })
        .collect()
}

#[pyclass(module = "pytdanorm", frozen, get_all)]
struct Decomposition {
    s_star: f64,
    delta_norm: f64,
    degenerate_pairs: usize,
    zero_scale: bool,
}

#[pymethods]
impl Decomposition {
    fn __repr__(&self) -> String {
        format!("Decomposition(s_star={}, delta_norm={})", self.s_star, self.delta_norm)
    }
}

#[pyfunction]
fn bottleneck(a: &Diagram, b: &Diagram) -> Distances {
    bottleneck_all(&a.inner, &b.inner).into()
}

#[pyfunction]
#[pyo3(signature = (x, y, max_dim = 2))]
fn space_bottleneck(x: &Space, y: &Space, max_dim: usize) -> PyResult<Distances> {
    Ok(tdanorm::space_bottleneck(&x.inner, &y.inner, max_dim).py()?.into())
}

#[pyfunction]
#[pyo3(signature = (x, y, max_dim = 2))]
fn normalized_bottleneck(x: &Space, y: &Space, max_dim: usize) -> PyResult<Distances> {
    Ok(tdanorm::normalized_bottleneck(&x.inner, &y.inner, max_dim).py()?.into())
}

#[pyfunction]
fn h_eval(x: &Space, y: &Space, s: f64) -> PyResult<f64> {
    tdanorm::h_eval(&x.inner, &y.inner, s).py()
}

#[pyfunction]
fn optimal_decomposition(x: &Space, y: &Space) -> PyResult<Decomposition> {
    let d = tdanorm::optimal_decomposition(&x.inner, &y.inner).py()?;
    Ok(Decomposition {
        s_star: d.s_star,
        delta_norm: d.delta_norm,
        degenerate_pairs: d.degenerate_pairs,
        zero_scale: d.zero_scale,
    })
}

#[pyfunction]
#[pyo3(signature = (x, y, max_dim = 2))]
fn stability_bound(x: &Space, y: &Space, max_dim: usize) -> PyResult<BoundReport> {
    let r = tdanorm::stability_bound(&x.inner, &y.inner, max_dim).py()?;
    Ok(reports(vec![r]).remove(0))
}

/// Projects `points` and returns the projected points, the measured epsilon
/// and the bound reports.
#[pyfunction]
#[pyo3(signature = (points, epsilon, seed = 0, max_dim = 1))]
fn jl_project(
    points: Vec<Vec<f64>>,
    epsilon: f64,
    seed: u64,
    max_dim: usize,
) -> PyResult<(Vec<Vec<f64>>, f64, Vec<BoundReport>)> {
    let cloud = PointCloud::new(points).py()?;
    let r = dimred::jl_project(&cloud, epsilon, seed).py()?;
    let checks = dimred::jl_bounds(&cloud, &r, max_dim, EpsilonSource::Measured).py()?;
    Ok((r.projected.points().to_vec(), r.epsilon_actual, reports(checks)))
}

/// Embeds `space` in `ℝ^m`; returns the embedding, the positive spectrum
/// and the bound reports.
#[pyfunction]
#[pyo3(signature = (space, m, clamp = false, max_dim = 2))]
fn mmds_embed(
    space: &Space,
    m: usize,
    clamp: bool,
    max_dim: usize,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Vec<BoundReport>)> {
    let r = dimred::mmds_embed(&space.inner, m, clamp).py()?;
    let checks = dimred::mmds_bounds(&space.inner, &r, max_dim).py()?;
    Ok((r.embedded.points().to_vec(), r.eigenvalues.clone(), reports(checks)))
}

/// `(k, lambda, D)` for an index-aligned pair, plus the bound reports.
#[pyfunction]
#[pyo3(signature = (x, y, max_dim = 2))]
fn bilipschitz(x: &Space, y: &Space, max_dim: usize) -> PyResult<((f64, f64, f64), Vec<BoundReport>)> {
    let p = dimred::bilipschitz_profile(&x.inner, &y.inner).py()?;
    let checks = dimred::bilipschitz_bounds(&x.inner, &y.inner, &p, max_dim).py()?;
    Ok(((p.k, p.lambda, p.big_d), reports(checks)))
}

#[pyfunction]
#[pyo3(signature = (n, radius, sigma = 0.0, seed = 0))]
fn noisy_circle(n: usize, radius: f64, sigma: f64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let c = generators::generate(&GeneratorSpec::noisy_circle(n, radius, sigma, seed)).py()?;
    Ok(c.points().to_vec())
}

#[pyfunction]
#[pyo3(signature = (n, radius, height = 1.0, sigma = 0.0, seed = 0))]
fn saddle_boundary(n: usize, radius: f64, height: f64, sigma: f64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let c = generators::generate(&GeneratorSpec::saddle(n, radius, height, sigma, seed)).py()?;
    Ok(c.points().to_vec())
}

/// Runs a config file; returns `(exit_code, bundle_json)`.
#[pyfunction]
fn run_config(path: &str) -> PyResult<(i32, String)> {
    let bundle = tdanorm::harness::run_config_file(path).py()?;
    Ok((bundle.exit_code(), bundle.to_json_string()))
}

#[pymodule]
fn pytdanorm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_class::<Diagram>()?;
    m.add_class::<Distances>()?;
    m.add_class::<BoundReport>()?;
    m.add_class::<Decomposition>()?;
    m.add_function(wrap_pyfunction!(bottleneck, m)?)?;
    m.add_function(wrap_pyfunction!(space_bottleneck, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_bottleneck, m)?)?;
    m.add_function(wrap_pyfunction!(h_eval, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(stability_bound, m)?)?;
    m.add_function(wrap_pyfunction!(jl_project, m)?)?;
    m.add_function(wrap_pyfunction!(mmds_embed, m)?)?;
    m.add_function(wrap_pyfunction!(bilipschitz, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_circle, m)?)?;
    m.add_function(wrap_pyfunction!(saddle_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
