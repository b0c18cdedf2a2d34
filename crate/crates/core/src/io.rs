//! CSV formats for point clouds, distance matrices and persistence diagrams.
//!
//! Values are written with 17 significant digits so they read back bit-for-bit.
//! Infinite deaths are written as `inf`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{distance_matrix, DistanceMatrix, PointCloud, Validation};
use crate::persistence::{PersistenceDiagram, PersistencePair};

pub const DIAGRAM_HEADER: &str = "dim,birth,death";

/// Formats a real at full round-trip precision.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_err(origin: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_row(origin: &str, line: usize, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .map_err(|_| parse_err(origin, line, format!("not a number: {f:?}")))
        })
        .collect()
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Numeric rows with their 1-based line numbers; `#` lines are skipped
/// except for a `# dim=d` header, which is returned.
fn numeric_rows(origin: &str, text: &str) -> Result<(Option<usize>, Vec<(usize, Vec<f64>)>)> {
    let mut dim = None;
    let mut rows = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(comment) = t.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("dim=") {
                let d = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(origin, line, format!("bad dimension header {t:?}")))?;
                dim = Some(d);
            }
            continue;
        }
        rows.push((line, parse_row(origin, line, t)?));
    }
    Ok((dim, rows))
}

pub fn parse_cloud(text: &str, origin: &str) -> Result<PointCloud> {
    let (dim, rows) = numeric_rows(origin, text)?;
    let expected = dim.or_else(|| rows.first().map(|r| r.1.len()));
    for (line, r) in &rows {
        if Some(r.len()) != expected {
            return Err(parse_err(
                origin,
                *line,
                format!("{} coordinates, expected {}", r.len(), expected.unwrap_or(0)),
            ));
        }
    }
    PointCloud::new(rows.into_iter().map(|r| r.1).collect())
}

pub fn format_cloud(cloud: &PointCloud) -> String {
    let mut out = format!("# dim={}\n", cloud.dim());
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|&v| fmt_real(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    parse_cloud(&read_text(path)?, &path.display().to_string())
}

pub fn write_cloud(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    write_text(path.as_ref(), &format_cloud(cloud))
}

pub fn parse_matrix(text: &str, origin: &str, validation: Validation) -> Result<DistanceMatrix> {
    let (_, rows) = numeric_rows(origin, text)?;
    let n = rows.len();
    for (line, r) in &rows {
        if r.len() != n {
            return Err(parse_err(
                origin,
                *line,
                format!("{} values in a {n}-row matrix", r.len()),
            ));
        }
    }
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
    DistanceMatrix::from_rows(&rows, validation)
}

pub fn format_matrix(d: &DistanceMatrix) -> String {
    let mut out = String::new();
    for i in 0..d.len() {
        let row: Vec<String> = d.row(i).iter().map(|&v| fmt_real(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads a distance matrix; triangle-inequality violations are logged.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    parse_matrix(&read_text(path)?, &path.display().to_string(), Validation::Ingest)
}

pub fn write_matrix(path: impl AsRef<Path>, d: &DistanceMatrix) -> Result<()> {
    write_text(path.as_ref(), &format_matrix(d))
}

pub fn parse_diagram(text: &str, origin: &str) -> Result<PersistenceDiagram> {
    let mut dims: Vec<Vec<PersistencePair>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || t.replace(' ', "") == DIAGRAM_HEADER {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(origin, line, "expected dim,birth,death"));
        }
        let dim: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("bad dimension {:?}", fields[0])))?;
        let value = |f: &str| {
            f.parse::<f64>()
                .map_err(|_| parse_err(origin, line, format!("not a number: {f:?}")))
        };
        let (birth, death) = (value(fields[1])?, value(fields[2])?);
        if !birth.is_finite() || death.is_nan() || death < birth {
            return Err(parse_err(origin, line, format!("invalid pair ({birth}, {death})")));
        }
        if dims.len() <= dim {
            dims.resize(dim + 1, Vec::new());
        }
        dims[dim].push(PersistencePair::new(birth, death));
    }
    PersistenceDiagram::from_dims(dims)
}

pub fn format_diagram(dgm: &PersistenceDiagram) -> String {
    let mut out = format!("{DIAGRAM_HEADER}\n");
    for (k, p) in dgm.rows() {
        let _ = writeln!(out, "{k},{},{}", fmt_real(p.birth), fmt_real(p.death));
    }
    out
}

pub fn read_diagram(path: impl AsRef<Path>) -> Result<PersistenceDiagram> {
    let path = path.as_ref();
    parse_diagram(&read_text(path)?, &path.display().to_string())
}

pub fn write_diagram(path: impl AsRef<Path>, dgm: &PersistenceDiagram) -> Result<()> {
    write_text(path.as_ref(), &format_diagram(dgm))
}

/// Contents of a file whose kind was detected from its text.
#[derive(Debug, Clone)]
pub enum InputFile {
    Cloud(PointCloud),
    Matrix(DistanceMatrix),
    Diagram(PersistenceDiagram),
}

impl InputFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InputFile::Cloud(_) => "cloud",
            InputFile::Matrix(_) => "matrix",
            InputFile::Diagram(_) => "diagram",
        }
    }

    /// The metric space, or `None` for a diagram.
    pub fn distances(&self) -> Option<DistanceMatrix> {
        match self {
            InputFile::Cloud(c) => Some(distance_matrix(c)),
            InputFile::Matrix(d) => Some(d.clone()),
            InputFile::Diagram(_) => None,
        }
    }
}

/// Detects the file kind: a `dim,birth,death` header means a diagram, a
/// `# dim=d` header a point cloud, and headerless square tables with a zero
/// diagonal that are symmetric are distance matrices. Anything else is read
/// as a point cloud.
pub fn parse_any(text: &str, origin: &str) -> Result<InputFile> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.replace(' ', "") == DIAGRAM_HEADER {
        return parse_diagram(text, origin).map(InputFile::Diagram);
    }
    let (dim, rows) = numeric_rows(origin, text)?;
    if dim.is_none() && looks_like_matrix(&rows) {
        return parse_matrix(text, origin, Validation::Ingest).map(InputFile::Matrix);
    }
    parse_cloud(text, origin).map(InputFile::Cloud)
}

fn looks_like_matrix(rows: &[(usize, Vec<f64>)]) -> bool {
    let n = rows.len();
    n >= 2
        && rows.iter().all(|r| r.1.len() == n)
        && (0..n).all(|i| rows[i].1[i] == 0.0)
        && (0..n).all(|i| (0..i).all(|j| rows[i].1[j] == rows[j].1[i]))
}

pub fn read_any(path: impl AsRef<Path>) -> Result<InputFile> {
    let path = path.as_ref();
    parse_any(&read_text(path)?, &path.display().to_string())
}
