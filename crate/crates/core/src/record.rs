//! Per-prime verification outcomes.

use std::time::Duration;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

/// An exact value on either side of a claimed identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Tuple(Vec<i64>),
    Bool(bool),
    Text(String),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<Vec<i64>> for Value {
    fn from(v: Vec<i64>) -> Self {
        Value::Tuple(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
            Value::Tuple(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(";"))
            }
        }
    }
}

/// Outcome of one named identity at one prime. `pass` is `expected == actual`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationRecord {
    pub p: u64,
    pub claim: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
    /// Informational fields; never part of the pass decision.
    pub detail: Vec<(String, Value)>,
    pub elapsed: Duration,
}

impl VerificationRecord {
    pub fn new(p: u64, claim: &str, expected: impl Into<Value>, actual: impl Into<Value>) -> Self {
        let expected = expected.into();
        let actual = actual.into();
        VerificationRecord {
            p,
            claim: claim.to_string(),
            pass: expected == actual,
            expected,
            actual,
            detail: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.push((key.to_string(), value.into()));
        self
    }

    pub fn detail(&self, key: &str) -> Option<&Value> {
        self.detail.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Serializable view; the timing is included only on request so that repeated
    /// runs produce identical bytes.
    pub fn view(&self, timings: bool) -> RecordView<'_> {
        RecordView { record: self, timings }
    }
}

pub struct RecordView<'a> {
    record: &'a VerificationRecord,
    timings: bool,
}

struct Detail<'a>(&'a [(String, Value)]);

impl Serialize for Detail<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for RecordView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let r = self.record;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("p", &r.p)?;
        map.serialize_entry("claim", &r.claim)?;
        map.serialize_entry("expected", &r.expected)?;
        map.serialize_entry("actual", &r.actual)?;
        map.serialize_entry("pass", &r.pass)?;
        if !r.detail.is_empty() {
            map.serialize_entry("detail", &Detail(&r.detail))?;
        }
        if self.timings {
            map.serialize_entry("elapsed_ms", &(r.elapsed.as_secs_f64() * 1e3))?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_equality() {
        let r = VerificationRecord::new(13, "formula2", 184u64, 184u64);
        assert!(r.pass);
        let r = VerificationRecord::new(13, "formula2", 184u64, 183u64);
        assert!(!r.pass);
        let r = VerificationRecord::new(13, "x", vec![1, 2], vec![1, 2]);
        assert!(r.pass);
    }

    #[test]
    fn json_key_order_is_fixed() {
        let r = VerificationRecord::new(5, "identity5", 41i64, 41i64)
            .with_detail("zeta", 1i64)
            .with_detail("alpha", true);
        let s = serde_json::to_string(&r.view(false)).unwrap();
        assert_eq!(
            s,
            r#"{"p":5,"claim":"identity5","expected":41,"actual":41,"pass":true,"detail":{"zeta":1,"alpha":true}}"#
        );
        let t = serde_json::to_string(&r.view(true)).unwrap();
        assert!(t.ends_with(r#""elapsed_ms":0.0}"#));
    }
}
