//! Command-line front end. Every command prints one JSON document on stdout;
//! the exit code is 0 on pass, 2 when a checked bound fails and 1 on any
//! input or hypothesis error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::experiments::{run_convergence_suite, run_epsopt_suite, run_perturbation_suite, run_transform_suite};
use super::io::{load_config, load_problem, save_report, EpsilonPolicy, ExperimentConfig, Format, Report, REPORT_VERSION};
use crate::error::{Error, Result};
use crate::lp::{slater_constant, Status};
use crate::model::{epigraph_reform, robust_counterpart, RobustProblem};
use crate::stability::ValueLipschitz;
use crate::tolerance::Tolerances;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ro-stability", version, about = "Stability certificates for robust linear programs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the config trial count.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Explicit epsilon (eta for `epsopt-check`).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutFormat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the robust counterpart of a problem file.
    Solve { problem: PathBuf },
    /// Strong Slater constant of the robust counterpart.
    Slater { problem: PathBuf },
    /// Stability constants of the (augmented) robust counterpart.
    Constants { problem: PathBuf },
    /// Randomized value-Lipschitz certification.
    Perturb { config: PathBuf },
    /// Sampled check of the set-to-system distance identity.
    TransformCheck { config: PathBuf },
    /// Epsilon-optimal set bound under perturbation.
    EpsoptCheck { config: PathBuf },
    /// Optimal solutions along a sequence converging to the nominal sets.
    Converge { config: PathBuf },
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

pub fn error_json(kind: &str, message: &str) -> String {
    let v = json!({ "version": REPORT_VERSION, "pass": false, "error": { "kind": kind, "message": message } });
    let mut s = serde_json::to_string_pretty(&v).expect("error serialization");
    s.push('\n');
    s
}

fn simple_report(command: &str, pass: bool, summary: Value) -> Report {
    Report {
        version: REPORT_VERSION,
        command: command.into(),
        pass,
        seed: None,
        config: None,
        summary,
        columns: Vec::new(),
        records: Vec::new(),
    }
}

fn counterpart_problem(rp: &RobustProblem) -> Result<RobustProblem> {
    match rp.fixed_cost() {
        Some(_) => Ok(rp.clone()),
        None => epigraph_reform(rp),
    }
}

fn solve_cmd(path: &Path, tol: &Tolerances) -> Result<Report> {
    let rp = counterpart_problem(&load_problem(path)?)?;
    let r = robust_counterpart(&rp)?.solve(tol)?;
    let value = match r.status {
        Status::Optimal => json!(r.value),
        Status::Infeasible => json!("inf"),
        Status::Unbounded => json!("-inf"),
    };
    Ok(simple_report("solve", true, json!({ "status": r.status, "value": value, "solution": r.solution, "iterations": r.iterations })))
}

fn slater_cmd(path: &Path, tol: &Tolerances) -> Result<Report> {
    let p = robust_counterpart(&counterpart_problem(&load_problem(path)?)?)?;
    let s = slater_constant(p.n(), &p.rows(), tol)?;
    let summary = match s.certificate() {
        Some(c) => json!({ "holds": true, "rho": c.rho, "point": c.point, "capped": c.capped }),
        None => json!({ "holds": false, "rho": s.rho() }),
    };
    Ok(simple_report("slater", s.certificate().is_some(), summary))
}

fn constants_cmd(path: &Path, eps: Option<f64>, tol: &Tolerances) -> Result<Report> {
    let rp = counterpart_problem(&load_problem(path)?)?;
    let ctx = ValueLipschitz::new(&rp, eps, tol)?;
    let mut summary = serde_json::to_value(&ctx.constants).map_err(|e| Error::Schema(e.to_string()))?;
    summary["rho"] = json!(ctx.augmented.rho);
    Ok(simple_report("constants", true, summary))
}

fn experiment_config(path: &Path, g: &GlobalArgs) -> Result<(ExperimentConfig, RobustProblem)> {
    let mut cfg = load_config(path)?;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(e) = g.eps {
        cfg.epsilon_policy = EpsilonPolicy::Explicit(e);
    }
    cfg.validate()?;
    let rp = cfg.load_problem(path.parent())?;
    Ok((cfg, rp))
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<(Report, Option<PathBuf>)> {
    let g = &cli.global;
    let (report, cfg_out) = match &cli.command {
        Command::Solve { problem } => (solve_cmd(problem, tol)?, None),
        Command::Slater { problem } => (slater_cmd(problem, tol)?, None),
        Command::Constants { problem } => (constants_cmd(problem, g.eps, tol)?, None),
        Command::Perturb { config } => {
            let (cfg, rp) = experiment_config(config, g)?;
            (run_perturbation_suite(&rp, &cfg, tol)?, cfg.output_path.clone())
        }
        Command::TransformCheck { config } => {
            let (cfg, rp) = experiment_config(config, g)?;
            (run_transform_suite(&rp, &cfg, tol)?, cfg.output_path.clone())
        }
        Command::EpsoptCheck { config } => {
            let (cfg, rp) = experiment_config(config, g)?;
            (run_epsopt_suite(&rp, &cfg, tol)?, cfg.output_path.clone())
        }
        Command::Converge { config } => {
            let (cfg, rp) = experiment_config(config, g)?;
            (run_convergence_suite(&rp, &cfg, tol)?.0, cfg.output_path.clone())
        }
    };
    let out = g.out.clone().or_else(|| cfg_out.map(PathBuf::from));
    Ok((report, out))
}

/// Runs the CLI on `argv` and returns the exit code with the stdout text.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_PASS, e.to_string()),
                _ => (EXIT_INPUT, error_json("Usage", e.render().to_string().trim())),
            };
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => return (EXIT_INPUT, error_json(&error_kind(&e), &e.to_string())),
    };
    let result = dispatch(&cli, &tol).and_then(|(report, out)| {
        if let Some(path) = out {
            let format = match cli.global.format {
                Some(OutFormat::Json) => Format::Json,
                Some(OutFormat::Csv) => Format::Csv,
                None => Format::infer(&path),
            };
            save_report(&path, &report, format)?;
        }
        Ok(report)
    });
    match result {
        Ok(report) => (if report.pass { EXIT_PASS } else { EXIT_VIOLATION }, report.to_json()),
        Err(e) => (EXIT_INPUT, error_json(&error_kind(&e), &e.to_string())),
    }
}
