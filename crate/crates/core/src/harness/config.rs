//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored; anything after a `#`
//! on a value line is a comment. Keys are case-sensitive and may appear once.
//! Relative paths resolve against the directory of the config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Fig1,
    Jl,
    Mmds,
    Bilip,
    Ingest,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Fig1 => "fig1",
            Pipeline::Jl => "jl",
            Pipeline::Mmds => "mmds",
            Pipeline::Bilip => "bilip",
            Pipeline::Ingest => "ingest",
        }
    }

    /// Keys accepted in addition to `pipeline`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Pipeline::Fig1 => &[
                "seed", "max_dim", "n", "radius", "sigma", "box", "scale", "large_radius",
                "large_box", "tau_n", "tau_b", "birth_small", "birth_large",
            ],
            Pipeline::Jl => &[
                "seeds", "max_dim", "input", "points", "dim", "data_seed", "epsilon",
                "epsilon_source",
            ],
            Pipeline::Mmds => &[
                "seeds", "max_dim", "input", "generator", "n", "radius", "height", "sigma",
                "target_dim", "clamp",
            ],
            Pipeline::Bilip => &[
                "seeds", "max_dim", "input", "reduced", "generator", "n", "radius", "height",
                "sigma", "perturbation",
            ],
            Pipeline::Ingest => &["max_dim", "original", "reduced", "reference", "tolerance"],
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    entries: BTreeMap<String, Entry>,
    base_dir: PathBuf,
    /// Raw text, hashed into the inputs digest.
    pub text: String,
}

fn config_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_in(text, Path::new("."))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_in(&text, base)
    }

    /// Parses `text`, resolving relative paths against `base_dir`.
    pub fn parse_in(text: &str, base_dir: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(config_err(line, "", "empty key"));
            }
            if let Some(prev) = entries.get(key) {
                return Err(config_err(
                    line,
                    key,
                    format!("duplicate key, first set on line {}", prev.line),
                ));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }

        let p = entries
            .remove("pipeline")
            .ok_or_else(|| config_err(0, "pipeline", "missing required key"))?;
        let pipeline = match p.value.as_str() {
            "fig1" => Pipeline::Fig1,
            "jl" => Pipeline::Jl,
            "mmds" => Pipeline::Mmds,
            "bilip" => Pipeline::Bilip,
            "ingest" => Pipeline::Ingest,
            other => {
                return Err(config_err(
                    p.line,
                    "pipeline",
                    format!("unknown pipeline {other:?}; expected fig1, jl, mmds, bilip or ingest"),
                ))
            }
        };
        for (key, e) in &entries {
            if !pipeline.keys().contains(&key.as_str()) {
                return Err(config_err(
                    e.line,
                    key,
                    format!("not a recognised key for the {pipeline} pipeline"),
                ));
            }
        }
        Ok(ExperimentConfig {
            pipeline,
            entries,
            base_dir: base_dir.to_path_buf(),
            text: text.to_string(),
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// All explicitly set keys with their raw values.
    pub fn values(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e.value.as_str()))
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    /// Raises a config error pointing at `key`.
    pub fn error(&self, key: &str, message: impl Into<String>) -> Error {
        config_err(self.line_of(key), key, message)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| config_err(e.line, key, format!("cannot parse {:?}", e.value))),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    /// A real that must satisfy `check`, described by `what` in errors.
    pub fn get_real(&self, key: &str, default: f64, what: &str, check: fn(f64) -> bool) -> Result<f64> {
        let v: f64 = self.get(key, default)?;
        if check(v) {
            Ok(v)
        } else {
            Err(self.error(key, format!("must be {what}, got {v}")))
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        self.get_real(key, default, "positive and finite", |v| v > 0.0 && v.is_finite())
    }

    pub fn nonnegative(&self, key: &str, default: f64) -> Result<f64> {
        self.get_real(key, default, "nonnegative and finite", |v| v >= 0.0 && v.is_finite())
    }

    pub fn count(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v: usize = self.get(key, default)?;
        if v < min {
            return Err(self.error(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    /// `lo,hi` with `lo ≤ hi`.
    pub fn range(&self, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
        let Some(raw) = self.get_str(key) else {
            return Ok(default);
        };
        let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[lo, hi]) if lo <= hi => Ok((lo, hi)),
            _ => Err(self.error(key, format!("expected `lo,hi` with lo ≤ hi, got {raw:?}"))),
        }
    }

    /// Seeds as `a..b` (half-open), a comma-separated list, or a single value.
    pub fn seeds(&self, key: &str, default: &[u64]) -> Result<Vec<u64>> {
        let Some(raw) = self.get_str(key) else {
            return Ok(default.to_vec());
        };
        let bad = || self.error(key, format!("expected `a..b`, a list or a number, got {raw:?}"));
        let seeds: Vec<u64> = if let Some((a, b)) = raw.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            (a..b).collect()
        } else {
            raw.split(',')
                .map(|s| s.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if seeds.is_empty() {
            return Err(self.error(key, "seed list is empty"));
        }
        Ok(seeds)
    }

    /// A path that must exist, resolved against the config directory.
    pub fn path(&self, key: &str) -> Result<Option<PathBuf>> {
        let Some(raw) = self.get_str(key) else {
            return Ok(None);
        };
        let p = Path::new(raw);
        let full = if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        };
        if !full.is_file() {
            return Err(self.error(key, format!("file {} does not exist", full.display())));
        }
        Ok(Some(full))
    }

    pub fn required_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key)?
            .ok_or_else(|| config_err(0, key, "missing required key"))
    }
}
