//! Experiment suites behind the CLI: value-Lipschitz certification under
//! random perturbations, convergence of optimal solutions, the transformation
//! identity and the ε-argmin bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::io::{ExperimentConfig, Report, REPORT_VERSION};
use super::perturb::{perturb_problem, PerturbationKind};
use crate::error::{Error, Result};
use crate::geometry::{directed_hausdorff, project_onto_polytope, Polytope};
use crate::lp::Status;
use crate::model::{constraintwise_distance, robust_counterpart, LsioProblem, RobustProblem};
use crate::setdist::{check_eps_argmin_lipschitz, eps_argmin};
use crate::stability::{augmented_counterpart, bd_solvable_terms, ValueLipschitz};
use crate::tolerance::Tolerances;
use crate::transform::{default_rho, verify_transform_distance_multi, SamplePlan};

/// Generator for trial `k`: seeded once, one stream per trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn magnitudes(config: &ExperimentConfig, admissible: f64, what: &str) -> Result<Vec<f64>> {
    let ms: Vec<f64> = config.magnitude_schedule.iter().map(|m| if config.relative_magnitudes { m * admissible } else { *m }).collect();
    if let Some(m) = ms.iter().find(|m| **m >= admissible) {
        return Err(Error::HypothesisViolated(format!("magnitude {m} is not below the admissible {what} = {admissible}")));
    }
    Ok(ms)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn config_echo(config: &ExperimentConfig) -> Value {
    serde_json::to_value(config).unwrap_or(Value::Null)
}

pub fn run_perturbation_suite(rp: &RobustProblem, config: &ExperimentConfig, tol: &Tolerances) -> Result<Report> {
    config.validate()?;
    let ctx = ValueLipschitz::new(rp, config.epsilon_policy.explicit(), tol)?;
    let eps = ctx.constants.epsilon;
    let ms = magnitudes(config, eps, "epsilon")?;
    let l = ctx.constants.lipschitz;
    let records: Vec<Value> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let m = ms[trial % ms.len()];
            let mut rng = trial_rng(config.seed, trial as u64);
            let v = perturb_problem(rp, config.perturbation_kind, m, &mut rng)?;
            let r = ctx.check(&v)?;
            let d_nat = r.context["dNat"].as_f64().unwrap_or(f64::NAN);
            let slope = if d_nat > 0.0 { r.measured / d_nat } else { 0.0 };
            Ok(json!({
                "trial": trial,
                "magnitude": m,
                "dNat": d_nat,
                "nuU": finite_or_null(ctx.nu_u),
                "nuV": r.context["nuV"].clone(),
                "measured": finite_or_null(r.measured),
                "bound": finite_or_null(r.bound),
                "slack": finite_or_null(r.slack),
                "slope": finite_or_null(slope),
                "L": l,
                "pass": r.pass,
            }))
        })
        .collect::<Result<_>>()?;
    let passed = records.iter().filter(|r| r["pass"] == json!(true)).count();
    let min_slack = records.iter().filter_map(|r| r["slack"].as_f64()).fold(f64::INFINITY, f64::min);
    let max_slope = records.iter().filter_map(|r| r["slope"].as_f64()).fold(0.0, f64::max);
    let pass = passed == records.len();
    Ok(Report {
        version: REPORT_VERSION,
        command: "perturb".into(),
        pass,
        seed: Some(config.seed),
        config: Some(config_echo(config)),
        summary: json!({
            "trials": records.len(),
            "passed": passed,
            "minSlack": finite_or_null(min_slack),
            "maxSlope": max_slope,
            "L": l,
            "slopeWithinL": max_slope <= l * (1.0 + 1e-12) + tol.report,
            "epsilon": eps,
            "rho": ctx.augmented.rho,
            "constants": serde_json::to_value(&ctx.constants).unwrap_or(Value::Null),
        }),
        columns: ["trial", "magnitude", "dNat", "nuU", "nuV", "measured", "bound", "slack", "slope", "L", "pass"]
            .map(String::from)
            .to_vec(),
        records,
    })
}

/// `F_opt(p)` as a polytope: feasible rows plus `<c, x> <= nu + slab`.
pub fn optimal_set_polytope(p: &LsioProblem, tol: &Tolerances) -> Result<(Polytope, Vec<f64>, f64)> {
    let probe = eps_argmin(p, 1.0, tol)?;
    let slab = tol.feasibility * (1.0 + probe.nu.abs());
    let e = eps_argmin(p, slab, tol)?;
    Ok((e.to_polytope(tol)?, e.optimal_point, e.nu))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceRecord {
    pub step: usize,
    pub d_nat: f64,
    pub nu: f64,
    pub x_star: Vec<f64>,
    pub dist_to_fopt_u: f64,
    /// `e(F_opt(V_j), F_opt(U))`.
    pub usc_excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceOutcome {
    pub records: Vec<ConvergenceRecord>,
    pub converged: bool,
    pub usc_holds: bool,
}

impl ConvergenceOutcome {
    pub fn pass(&self) -> bool {
        self.converged && self.usc_holds
    }
}

/// Number of final steps on which the USC containment is checked.
pub const USC_TAIL: usize = 5;

/// Solves `RO(V_j)` along `V_j -> U` and tracks `d(x*_j, F_opt(U))`.
pub fn convergence_along(rp: &RobustProblem, sequence: &[RobustProblem], usc_delta: f64, tol: &Tolerances) -> Result<ConvergenceOutcome> {
    let (fopt_u, _, _) = optimal_set_polytope(&robust_counterpart(rp)?, tol)?;
    let records = sequence
        .par_iter()
        .enumerate()
        .map(|(j, v)| {
            let d_nat = constraintwise_distance(rp, v)?.value;
            let pv = robust_counterpart(v)?;
            let (fopt_v, x, nu) = optimal_set_polytope(&pv, tol)
                .map_err(|e| Error::HypothesisViolated(format!("RO(V_{j}) has no bounded optimal set: {e}")))?;
            Ok(ConvergenceRecord {
                step: j,
                d_nat,
                nu,
                dist_to_fopt_u: project_onto_polytope(&x, &fopt_u)?.dist,
                x_star: x,
                usc_excess: directed_hausdorff(&fopt_v, &fopt_u)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = records.first().map(|r| r.dist_to_fopt_u).unwrap_or(0.0);
    let last = records.last().map(|r| r.dist_to_fopt_u).unwrap_or(0.0);
    let converged = last <= 1e-7 || last <= 1e-3 * first;
    let tail = records.len().saturating_sub(USC_TAIL);
    let usc_holds = records[tail..].iter().all(|r| r.usc_excess < usc_delta);
    Ok(ConvergenceOutcome { records, converged, usc_holds })
}

/// `V_j` = perturbation of `U` with magnitude `m 2^-j`, the same random
/// draws at every step.
pub fn halving_sequence(rp: &RobustProblem, kind: PerturbationKind, m: f64, steps: usize, seed: u64) -> Result<Vec<RobustProblem>> {
    (0..steps)
        .map(|j| {
            let mut rng = trial_rng(seed, 0);
            perturb_problem(rp, kind, m * 0.5f64.powi(j as i32), &mut rng)
        })
        .collect()
}

pub fn run_convergence_suite(rp: &RobustProblem, config: &ExperimentConfig, tol: &Tolerances) -> Result<(Report, ConvergenceOutcome)> {
    config.validate()?;
    let ctx = ValueLipschitz::new(rp, config.epsilon_policy.explicit(), tol)?;
    let m = magnitudes(config, ctx.constants.epsilon, "epsilon")?[0];
    let seq = halving_sequence(rp, config.perturbation_kind, m, config.steps.max(1), config.seed)?;
    let out = convergence_along(rp, &seq, config.usc_delta, tol)?;
    let records = out
        .records
        .iter()
        .map(|r| {
            json!({
                "step": r.step,
                "dNat": r.d_nat,
                "nu": r.nu,
                "xStar": r.x_star.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "),
                "distToFoptU": r.dist_to_fopt_u,
                "uscExcess": r.usc_excess,
            })
        })
        .collect();
    let report = Report {
        version: REPORT_VERSION,
        command: "converge".into(),
        pass: out.pass(),
        seed: Some(config.seed),
        config: Some(config_echo(config)),
        summary: json!({
            "steps": out.records.len(),
            "converged": out.converged,
            "uscHolds": out.usc_holds,
            "initialDist": out.records.first().map(|r| r.dist_to_fopt_u),
            "finalDist": out.records.last().map(|r| r.dist_to_fopt_u),
        }),
        columns: ["step", "dNat", "nu", "xStar", "distToFoptU", "uscExcess"].map(String::from).to_vec(),
        records,
    };
    Ok((report, out))
}

/// `min x2` over `[-1, 1] x [0, 2]`: the optimal set is the bottom edge. In
/// `V_j` the bottom row is tilted to `theta0 2^-j x1 + x2 >= 0`, which makes
/// the optimum a single corner that approaches the edge.
pub fn degenerate_edge_instance(theta0: f64, steps: usize) -> Result<(RobustProblem, Vec<RobustProblem>)> {
    let build = |theta: f64| {
        let single = |v: Vec<f64>| Polytope::new(vec![v]);
        RobustProblem::fixed(
            vec![0.0, 1.0],
            vec![
                ("bottom".to_string(), single(vec![theta, 1.0, 0.0])?),
                ("left".to_string(), single(vec![1.0, 0.0, -1.0])?),
                ("right".to_string(), single(vec![-1.0, 0.0, -1.0])?),
                ("top".to_string(), single(vec![0.0, -1.0, -2.0])?),
            ],
        )
    };
    let u = build(0.0)?;
    let seq = (0..steps).map(|j| build(theta0 * 0.5f64.powi(j as i32))).collect::<Result<_>>()?;
    Ok((u, seq))
}

/// Constraint-wise projection of a coupled scenario set: `U_alpha` is the
/// hull of the `alpha`-th rows of the scenario matrices.
pub fn couple_project(cost: Vec<f64>, scenarios: &[Vec<Vec<f64>>]) -> Result<RobustProblem> {
    let first = scenarios.first().ok_or_else(|| Error::ShapeMismatch("at least one scenario is required".into()))?;
    let rows = first.len();
    let cols = cost.len() + 1;
    for (k, s) in scenarios.iter().enumerate() {
        if s.len() != rows || s.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("scenario {k} is not {rows} x {cols}")));
        }
    }
    let sets = (0..rows)
        .map(|alpha| {
            let vertices = scenarios.iter().map(|s| s[alpha].clone()).collect();
            Ok((format!("r{alpha}"), Polytope::new(vertices)?))
        })
        .collect::<Result<Vec<_>>>()?;
    RobustProblem::fixed(cost, sets)
}

pub fn run_transform_suite(rp: &RobustProblem, config: &ExperimentConfig, tol: &Tolerances) -> Result<Report> {
    config.validate()?;
    let rho = default_rho(rp, tol)?;
    let ms = magnitudes(config, f64::INFINITY, "magnitude")?;
    let base_plan = config.sample_plan.clone().unwrap_or(SamplePlan { seed: config.seed, ..SamplePlan::default() });
    let records: Vec<Value> = (0..config.trials)
        .map(|trial| {
            let m = if config.relative_magnitudes { config.magnitude_schedule[trial % ms.len()] } else { ms[trial % ms.len()] };
            let mut rng = trial_rng(config.seed, trial as u64);
            let v = perturb_problem(rp, config.perturbation_kind, m, &mut rng)?;
            let plan = SamplePlan { seed: base_plan.seed.wrapping_add(trial as u64), ..base_plan.clone() };
            let c = verify_transform_distance_multi(rp, &v, rho, &plan, tol)?;
            Ok(json!({
                "trial": trial,
                "magnitude": m,
                "measured": c.report.measured,
                "bound": c.report.bound,
                "gap": (c.report.measured - c.report.bound).abs(),
                "evaluations": c.evaluations,
                "pass": c.report.pass,
            }))
        })
        .collect::<Result<_>>()?;
    let passed = records.iter().filter(|r| r["pass"] == json!(true)).count();
    let max_gap = records.iter().filter_map(|r| r["gap"].as_f64()).fold(0.0, f64::max);
    Ok(Report {
        version: REPORT_VERSION,
        command: "transform-check".into(),
        pass: passed == records.len(),
        seed: Some(config.seed),
        config: Some(config_echo(config)),
        summary: json!({ "trials": records.len(), "passed": passed, "maxGap": max_gap, "rho": rho }),
        columns: ["trial", "magnitude", "measured", "bound", "gap", "evaluations", "pass"].map(String::from).to_vec(),
        records,
    })
}

/// `eta` defaults to half the distance from the augmented counterpart to
/// the boundary of the solvable set.
pub fn run_epsopt_suite(rp: &RobustProblem, config: &ExperimentConfig, tol: &Tolerances) -> Result<Report> {
    config.validate()?;
    let aug = augmented_counterpart(rp, tol)?;
    let limit = bd_solvable_terms(&aug.problem, tol).map_err(|e| Error::HypothesisViolated(format!("interior solvability: {e}")))?.value();
    let eta = config.epsilon_policy.explicit().unwrap_or(0.5 * limit);
    let ms = magnitudes(config, eta, "eta")?;
    let records: Vec<Value> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let m = ms[trial % ms.len()];
            let mut rng = trial_rng(config.seed, trial as u64);
            let v = perturb_problem(rp, config.perturbation_kind, m, &mut rng)?;
            let c = check_eps_argmin_lipschitz(rp, &v, eta, config.argmin_epsilon, None, None, tol)?;
            Ok(json!({
                "trial": trial,
                "magnitude": m,
                "dNat": c.d_nat,
                "measured": c.report.measured,
                "estimated": c.d_hat.estimated,
                "hausdorff": c.hausdorff,
                "bound": c.report.bound,
                "coefficient": c.coefficient,
                "r": c.r,
                "r0": c.r0,
                "pass": c.report.pass,
            }))
        })
        .collect::<Result<_>>()?;
    let passed = records.iter().filter(|r| r["pass"] == json!(true)).count();
    Ok(Report {
        version: REPORT_VERSION,
        command: "epsopt-check".into(),
        pass: passed == records.len(),
        seed: Some(config.seed),
        config: Some(config_echo(config)),
        summary: json!({ "trials": records.len(), "passed": passed, "eta": eta, "argminEpsilon": config.argmin_epsilon }),
        columns: ["trial", "magnitude", "dNat", "measured", "estimated", "hausdorff", "bound", "coefficient", "r", "r0", "pass"]
            .map(String::from)
            .to_vec(),
        records,
    })
}

/// Optimal value of the robust problem, through the epigraph form when the
/// cost is uncertain.
pub fn robust_value(rp: &RobustProblem, tol: &Tolerances) -> Result<(Status, f64)> {
    let rp = match rp.fixed_cost() {
        Some(_) => rp.clone(),
        None => crate::model::epigraph_reform(rp)?,
    };
    let r = robust_counterpart(&rp)?.solve(tol)?;
    Ok((r.status, r.value))
}
