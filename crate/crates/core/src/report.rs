//! Machine-readable outcome of one certificate check.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// `bound` versus `measured`; passes when `bound - measured >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub check: String,
    #[serde(with = "ext_f64")]
    pub bound: f64,
    #[serde(with = "ext_f64")]
    pub measured: f64,
    #[serde(with = "ext_f64")]
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub context: Map<String, Value>,
}

impl CertificateReport {
    /// One-sided report: `measured <= bound`.
    pub fn upper(check: impl Into<String>, bound: f64, measured: f64, tolerance: f64) -> Self {
        let slack = bound - measured;
        Self {
            check: check.into(),
            bound,
            measured,
            slack,
            tolerance,
            pass: slack.is_finite() && slack >= -tolerance || (bound == f64::INFINITY && measured.is_finite()),
            context: Map::new(),
        }
    }

    /// Two-sided report: `|measured - bound| <= tolerance`. The slack is
    /// `-|measured - bound|`.
    pub fn equality(check: impl Into<String>, bound: f64, measured: f64, tolerance: f64) -> Self {
        let slack = -(bound - measured).abs();
        Self { check: check.into(), bound, measured, slack, tolerance, pass: slack.is_finite() && slack >= -tolerance, context: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.context.insert(key.to_string(), v);
        self
    }
}

/// JSON numbers with `"inf"`, `"-inf"` and `"nan"` strings for the
/// non-finite values.
pub mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
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

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: '{other}'"))),
            },
        }
    }
}
