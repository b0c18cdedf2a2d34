//! End-to-end experiment runs producing a JSON bundle of bound reports.

pub mod config;
pub mod pipelines;

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::report::BoundReport;

pub use config::{ExperimentConfig, Pipeline};
pub use pipelines::{run_pipeline, PipelineOutput, REFERENCE_DB, REFERENCE_DN, REFERENCE_SCALE};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_BOUND_FAILURE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        }
    }

    pub fn digest(&self) -> String {
        sha256_hex(format!("{}\n{}\n{}\n{}", self.package, self.version, self.os, self.arch).as_bytes())
    }

    fn to_json(&self) -> Value {
        json!({
            "package": self.package,
            "version": self.version,
            "os": self.os,
            "arch": self.arch,
            "digest": self.digest(),
        })
    }
}

/// Result of one configured run.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub pipeline: Pipeline,
    pub config: Vec<(String, String)>,
    pub seeds: Vec<u64>,
    pub environment: Environment,
    pub inputs_digest: String,
    pub reports: Vec<BoundReport>,
    pub summary: Map<String, Value>,
    pub notices: Vec<String>,
    /// Seconds since the epoch; not part of [`Bundle::digest`].
    pub timestamp: u64,
}

impl Bundle {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.reports.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            EXIT_PASS
        } else {
            EXIT_BOUND_FAILURE
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundReport> {
        self.reports.iter().filter(|r| !r.pass)
    }

    fn body(&self) -> Map<String, Value> {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let mut body = Map::new();
        body.insert("pipeline".into(), json!(self.pipeline.name()));
        body.insert("config".into(), Value::Object(config));
        body.insert("seeds".into(), json!(self.seeds));
        body.insert("environment".into(), self.environment.to_json());
        body.insert("inputs_digest".into(), json!(self.inputs_digest));
        body.insert(
            "reports".into(),
            serde_json::to_value(&self.reports).expect("reports serialize"),
        );
        body.insert("summary".into(), Value::Object(self.summary.clone()));
        body.insert("notices".into(), json!(self.notices));
        body.insert("passed".into(), json!(self.passed()));
        body.insert("failed".into(), json!(self.failed()));
        body.insert("all_pass".into(), json!(self.all_pass()));
        body
    }

    /// SHA-256 of the bundle without its timestamp.
    pub fn digest(&self) -> String {
        sha256_hex(Value::Object(self.body()).to_string().as_bytes())
    }

    pub fn to_json(&self) -> Value {
        let digest = self.digest();
        let mut body = self.body();
        body.insert("digest".into(), json!(digest));
        body.insert("timestamp".into(), json!(self.timestamp));
        Value::Object(body)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("bundle serializes")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn inputs_digest(config: &ExperimentConfig, out: &PipelineOutput) -> Result<String> {
    let mut h = Sha256::new();
    h.update(config.text.as_bytes());
    for f in &out.files {
        h.update(fs::read(f).map_err(|e| Error::io(f, e))?);
    }
    for s in &out.seeds {
        h.update(s.to_le_bytes());
    }
    Ok(hex::encode(h.finalize()))
}

pub fn run_suite(config: &ExperimentConfig) -> Result<Bundle> {
    let out = run_pipeline(config)?;
    let digest = inputs_digest(config, &out)?;
    let reports = out
        .reports
        .into_iter()
        .map(|r| r.with_digest(digest.clone()))
        .collect();
    for n in &out.notices {
        log::info!("{n}");
    }
    Ok(Bundle {
        pipeline: config.pipeline,
        config: config
            .values()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        seeds: out.seeds,
        environment: Environment::current(),
        inputs_digest: digest,
        reports,
        summary: out.summary,
        notices: out.notices,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    })
}

pub fn run_config_file(path: impl AsRef<Path>) -> Result<Bundle> {
    run_suite(&ExperimentConfig::load(path)?)
}

/// Exit status for the outcome of a run: 0 all pass, 1 a bound failed, 2 an error.
pub fn exit_status(outcome: &Result<Bundle>) -> i32 {
    match outcome {
        Ok(b) => b.exit_code(),
        Err(_) => EXIT_ERROR,
    }
}
