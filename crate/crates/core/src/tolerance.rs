//! Numerical tolerances shared by every module.
//!
//! The defaults can be overridden through the `ROBUST_STABILITY_TOL`
//! environment variable, either with a single number (applied to the
//! feasibility, optimality and geometry tolerances) or with a comma separated
//! `key=value` list, e.g. `feasibility=1e-8,geometry=1e-11`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "ROBUST_STABILITY_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Row violation accepted when checking primal feasibility.
    pub feasibility: f64,
    /// Reduced-cost / duality-gap threshold.
    pub optimality: f64,
    /// Distances below this are treated as zero (membership, projections).
    pub geometry: f64,
    /// Slack accepted by a `CertificateReport` before it is marked failed.
    pub report: f64,
    /// Inputs closer than this to a boundary are rejected as ill-posed.
    pub boundary: f64,
    /// Box bound on the strong Slater constant LP.
    pub slater_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { feasibility: 1e-9, optimality: 1e-9, geometry: 1e-10, report: 1e-7, boundary: 1e-9, slater_cap: 1e6 }
    }
}

impl Tolerances {
    /// Defaults, overridden by `ROBUST_STABILITY_TOL` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(spec) => Self::default().with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(v) = spec.parse::<f64>() {
            let v = positive(v, "tolerance")?;
            self.feasibility = v;
            self.optimality = v;
            self.geometry = v;
            return Ok(self);
        }
        for item in spec.split(',') {
            let (key, value) =
                item.split_once('=').ok_or_else(|| Error::InvalidInput(format!("{ENV_VAR}: expected key=value, got '{item}'")))?;
            let value: f64 = value.trim().parse().map_err(|_| Error::InvalidInput(format!("{ENV_VAR}: '{value}' is not a number")))?;
            let key = key.trim();
            let value = positive(value, key)?;
            match key {
                "feasibility" => self.feasibility = value,
                "optimality" => self.optimality = value,
                "geometry" => self.geometry = value,
                "report" => self.report = value,
                "boundary" => self.boundary = value,
                "slaterCap" | "slater_cap" => self.slater_cap = value,
                other => return Err(Error::InvalidInput(format!("{ENV_VAR}: unknown key '{other}'"))),
            }
        }
        Ok(self)
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("{ENV_VAR}: {what} must be a positive number")))
    }
}
