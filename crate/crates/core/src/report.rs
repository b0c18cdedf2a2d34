//! Named inequality checks with measured and bound sides.

use serde::{Serialize, Serializer};

/// Absolute slack allowed on every inequality.
pub const PASS_TOLERANCE: f64 = 1e-9;

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    #[serde(serialize_with = "serialize_real")]
    pub lhs: f64,
    #[serde(serialize_with = "serialize_real")]
    pub rhs: f64,
    #[serde(serialize_with = "serialize_real")]
    pub slack: f64,
    pub pass: bool,
    pub inputs_digest: String,
    /// Seed of the trial in a sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + PASS_TOLERANCE,
            inputs_digest: String::new(),
            seed: None,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.inputs_digest = digest.into();
        self
    }
}

/// Writes non-finite values as the strings `"inf"`, `"-inf"` and `"nan"`,
/// since JSON has no literal for them.
pub fn serialize_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// JSON value for a real, with the same convention as [`serialize_real`].
pub fn real_json(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_uses_absolute_slack() {
        assert!(BoundReport::new("a", 1.0 + 5e-10, 1.0).pass);
        assert!(!BoundReport::new("a", 1.0 + 5e-9, 1.0).pass);
        assert!(!BoundReport::new("a", f64::INFINITY, 1.0).pass);
        assert!(!BoundReport::new("a", f64::NAN, 1.0).pass);
        let r = BoundReport::new("a", 0.25, 1.0);
        assert_eq!(r.slack, 0.75);
    }

    #[test]
    fn infinite_values_serialize_as_strings() {
        let r = BoundReport::new("x", f64::INFINITY, 2.0);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["lhs"], "inf");
        assert_eq!(v["slack"], "-inf");
        assert_eq!(v["rhs"], 2.0);
    }
}
