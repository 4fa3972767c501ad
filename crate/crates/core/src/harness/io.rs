//! JSON problem files, experiment configs and report files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::perturb::PerturbationKind;
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::model::{Cost, RobustProblem, UncertainConstraint};
use crate::transform::SamplePlan;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexList {
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RawConstraint {
    name: Option<String>,
    vertices: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawProblem {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost_set: Option<VertexList>,
    constraints: Vec<RawConstraint>,
}

/// On-disk problem: `{"n", "cost" | "costSet", "constraints": [{"name", "vertices"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProblemFile(Value);

impl ProblemFile {
    pub fn to_problem(&self) -> Result<RobustProblem> {
        problem_from_value(self.0.clone())
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn problem_from_value(v: Value) -> Result<RobustProblem> {
    let raw: RawProblem = serde_json::from_value(v).map_err(|e| schema(e.to_string()))?;
    build_problem(raw)
}

fn build_problem(raw: RawProblem) -> Result<RobustProblem> {
    let cost = match (raw.cost, raw.cost_set) {
        (Some(c), None) => {
            if c.len() != raw.n {
                return Err(schema(format!("\"cost\" has length {}, expected n = {}", c.len(), raw.n)));
            }
            Cost::Fixed(c)
        }
        (None, Some(set)) => Cost::Uncertain(Polytope::new(set.vertices).map_err(|e| schema(format!("\"costSet\": {e}")))?),
        (Some(_), Some(_)) => return Err(schema("give either \"cost\" or \"costSet\", not both")),
        (None, None) => return Err(schema("missing field \"cost\" (or \"costSet\")")),
    };
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.into_iter().enumerate() {
        let name = c.name.ok_or_else(|| schema(format!("constraints[{i}]: missing field \"name\"")))?;
        let vertices = c.vertices.ok_or_else(|| schema(format!("constraints[{i}] ('{name}'): missing field \"vertices\"")))?;
        if vertices.is_empty() {
            return Err(Error::EmptyUncertaintySet(name));
        }
        for (k, v) in vertices.iter().enumerate() {
            if v.len() != raw.n + 1 {
                return Err(schema(format!(
                    "constraints[{i}] ('{name}'): vertex {k} has length {}, expected n + 1 = {}",
                    v.len(),
                    raw.n + 1
                )));
            }
        }
        let set = Polytope::new(vertices).map_err(|e| schema(format!("constraints[{i}] ('{name}'): {e}")))?;
        constraints.push(UncertainConstraint { name, set });
    }
    RobustProblem::new(raw.n, cost, constraints)
}

pub fn parse_problem(text: &str) -> Result<RobustProblem> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    build_problem(raw)
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<RobustProblem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem(&text)
}

fn to_raw(rp: &RobustProblem) -> RawProblem {
    let (cost, cost_set) = match rp.cost() {
        Cost::Fixed(c) => (Some(c.clone()), None),
        Cost::Uncertain(p) => (None, Some(VertexList { vertices: p.vertices().to_vec() })),
    };
    RawProblem {
        n: rp.n(),
        cost,
        cost_set,
        constraints: rp
            .constraints()
            .iter()
            .map(|c| RawConstraint { name: Some(c.name.clone()), vertices: Some(c.set.vertices().to_vec()) })
            .collect(),
    }
}

pub fn problem_to_json(rp: &RobustProblem) -> String {
    let mut s = serde_json::to_string_pretty(&to_raw(rp)).expect("problem serialization");
    s.push('\n');
    s
}

pub fn save_problem(path: impl AsRef<Path>, rp: &RobustProblem) -> Result<()> {
    std::fs::write(path, problem_to_json(rp))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EpsilonPolicy {
    #[default]
    HalfDistBdSolvable,
    Explicit(f64),
}

impl EpsilonPolicy {
    pub fn explicit(&self) -> Option<f64> {
        match self {
            EpsilonPolicy::HalfDistBdSolvable => None,
            EpsilonPolicy::Explicit(e) => Some(*e),
        }
    }
}

fn default_trials() -> usize {
    10
}

fn default_kind() -> PerturbationKind {
    PerturbationKind::Translate
}

fn default_schedule() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

fn default_steps() -> usize {
    20
}

fn default_argmin_epsilon() -> f64 {
    0.5
}

fn default_usc_delta() -> f64 {
    1e-4
}

/// Settings for the experiment subcommands. Magnitudes are absolute when
/// `relativeMagnitudes` is false, otherwise fractions of the admissible
/// radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_kind")]
    pub perturbation_kind: PerturbationKind,
    #[serde(default = "default_schedule")]
    pub magnitude_schedule: Vec<f64>,
    #[serde(default)]
    pub relative_magnitudes: bool,
    #[serde(default)]
    pub epsilon_policy: EpsilonPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_path: Option<String>,
    /// Number of steps of a convergence schedule.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// The ε of the ε-optimal sets.
    #[serde(default = "default_argmin_epsilon")]
    pub argmin_epsilon: f64,
    /// Inflation radius of the optimal set in the USC check.
    #[serde(default = "default_usc_delta")]
    pub usc_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_plan: Option<SamplePlan>,
}

impl ExperimentConfig {
    pub fn new(problem: &RobustProblem) -> Self {
        Self {
            seed: 0,
            trials: default_trials(),
            perturbation_kind: default_kind(),
            magnitude_schedule: default_schedule(),
            relative_magnitudes: false,
            epsilon_policy: EpsilonPolicy::default(),
            output_path: None,
            problem: Some(ProblemFile(serde_json::to_value(to_raw(problem)).expect("problem serialization"))),
            problem_path: None,
            steps: default_steps(),
            argmin_epsilon: default_argmin_epsilon(),
            usc_delta: default_usc_delta(),
            sample_plan: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be positive".into()));
        }
        if self.magnitude_schedule.is_empty() || self.magnitude_schedule.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidInput("magnitudeSchedule must be a non-empty list of positive numbers".into()));
        }
        if let EpsilonPolicy::Explicit(e) = self.epsilon_policy {
            if !(e > 0.0) {
                return Err(Error::InvalidInput("explicit epsilon must be positive".into()));
            }
        }
        if !(self.argmin_epsilon > 0.0) || !(self.usc_delta > 0.0) {
            return Err(Error::InvalidInput("argminEpsilon and uscDelta must be positive".into()));
        }
        Ok(())
    }

    /// The problem, inline or loaded relative to `base`.
    pub fn load_problem(&self, base: Option<&Path>) -> Result<RobustProblem> {
        match (&self.problem, &self.problem_path) {
            (Some(p), None) => p.to_problem(),
            (None, Some(path)) => {
                let p = Path::new(path);
                let full = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.to_path_buf(),
                };
                load_problem(full)
            }
            (Some(_), Some(_)) => Err(schema("give either \"problem\" or \"problemPath\", not both")),
            (None, None) => Err(schema("missing field \"problem\" (or \"problemPath\")")),
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    c.validate()?;
    Ok(c)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Versioned report: config echo, per-record rows and a summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
    pub summary: Value,
    /// Column order of the CSV mirror.
    pub columns: Vec<String>,
    pub records: Vec<Value>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.records {
            let row: Vec<String> = self
                .columns
                .iter()
                .map(|c| match r.get(c) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                })
                .collect();
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// From the file extension; CSV unless the path ends in `.json`.
    pub fn infer(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn save_report(path: impl AsRef<Path>, report: &Report, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = r#"{
  "n": 1,
  "cost": [1.0],
  "constraints": [
    { "name": "u", "vertices": [[1.0, 1.0], [2.0, 1.0]] }
  ]
}"#;

    #[test]
    fn round_trip_is_byte_identical() {
        let p = parse_problem(TOY).unwrap();
        let text = problem_to_json(&p);
        assert_eq!(problem_to_json(&parse_problem(&text).unwrap()), text);
        assert_eq!(parse_problem(&text).unwrap(), p);
    }

    #[test]
    fn missing_vertices_names_the_constraint() {
        let bad = r#"{"n": 1, "cost": [1.0], "constraints": [{"name": "c1"}]}"#;
        let e = parse_problem(bad).unwrap_err().to_string();
        assert!(e.contains("'c1'") && e.contains("vertices"), "{e}");
        let bad = r#"{"n": 1, "cost": [1.0], "constraints": [{"name": "c1", "vertices": [[1.0]]}]}"#;
        assert!(parse_problem(bad).unwrap_err().to_string().contains("expected n + 1"));
        let bad = r#"{"n": 1, "cost": [1.0], "constraints": [{"name": "c1", "vertices": []}]}"#;
        assert!(matches!(parse_problem(bad), Err(Error::EmptyUncertaintySet(_))));
        let bad = "{\"n\": 1,\n \"cost\": [1.0], \"oops\": 3, \"constraints\": []}";
        assert!(parse_problem(bad).unwrap_err().to_string().contains("line 2"));
    }

    #[test]
    fn cost_set_round_trip() {
        let text = r#"{"n": 1, "costSet": {"vertices": [[1.0], [2.0]]}, "constraints": []}"#;
        let p = parse_problem(text).unwrap();
        assert!(matches!(p.cost(), Cost::Uncertain(_)));
        assert!(problem_to_json(&p).contains("costSet"));
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let r = Report {
            version: REPORT_VERSION,
            command: "x".into(),
            pass: true,
            seed: Some(1),
            config: None,
            summary: Value::Null,
            columns: vec!["a".into(), "b".into()],
            records: vec![serde_json::json!({"a": 1, "b": "z"}), serde_json::json!({"a": 2.5})],
        };
        let csv = r.to_csv().unwrap();
        assert_eq!(csv, "a,b\n1,z\n2.5,\n");
    }

    #[test]
    fn config_defaults_and_policy() {
        let c = parse_config(&format!(r#"{{"seed": 4, "epsilonPolicy": {{"explicit": 0.1}}, "problem": {TOY}}}"#)).unwrap();
        assert_eq!(c.epsilon_policy.explicit(), Some(0.1));
        assert_eq!(c.trials, 10);
        assert!(c.load_problem(None).is_ok());
        assert!(parse_config(r#"{"trials": 0}"#).is_err());
        let c = parse_config(r#"{"epsilonPolicy": "halfDistBdSolvable"}"#).unwrap();
        assert_eq!(c.epsilon_policy.explicit(), None);
    }
}
