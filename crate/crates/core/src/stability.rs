//! Set mappings `H`, `R`, `Z^-`, the distances to infeasibility and to the
//! boundary of the solvable set, and the explicit Lipschitz constant
//! `L(pi, eps)` of the optimal value.
//!
//! Every quantity is a function of the constraint *set*: the builders work on
//! the canonical (sorted, deduplicated) rows, so Π-equivalent inputs give
//! bitwise identical constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_origin_to_hset, inradius_at_origin, HSet, Polytope};
use crate::lp::{optimal_face_bounded, slater_constant, Slater, Status};
use crate::model::{constraintwise_distance, robust_counterpart, Constraint, LsioProblem, RobustProblem};
use crate::report::CertificateReport;
use crate::tolerance::Tolerances;
use crate::vecops::norm;

/// Label of the trivial row `(0_n, -rho)` appended to robust counterparts.
pub const RHO_LABEL: &str = "rho";

pub fn phi(lambda: f64) -> f64 {
    (1.0 + lambda * lambda).sqrt()
}

pub fn psi(alpha: f64) -> f64 {
    (1.0 + alpha) * (1.0 + alpha * alpha).sqrt()
}

fn canonical_rows(constraints: &[Constraint]) -> Vec<Vec<f64>> {
    let mut v: Vec<Vec<f64>> = constraints.iter().map(Constraint::stacked).collect();
    v.sort_by(|a, b| crate::vecops::lex_cmp(a, b));
    v.dedup();
    v
}

/// Generators `(a_t, b_t)` of `H(sigma)`.
pub fn build_h(system: &[Constraint]) -> Result<HSet> {
    let rows = canonical_rows(system);
    if rows.is_empty() {
        return Err(Error::InvalidInput("H(sigma) of an empty system".into()));
    }
    HSet::new(rows)
}

/// `max(max_t -b_t, nu)`.
pub fn sup_r(p: &LsioProblem, nu: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::NuNotFinite);
    }
    Ok(p.constraints.iter().map(|c| -c.b).fold(nu, f64::max))
}

/// `conv({a_t} ∪ {-c})`.
pub fn build_zminus(p: &LsioProblem) -> Result<Polytope> {
    let n = p.n();
    let mut v: Vec<Vec<f64>> = canonical_rows(&p.constraints).into_iter().map(|r| r[..n].to_vec()).collect();
    v.push(p.cost.iter().map(|x| -x).collect());
    Ok(Polytope::new(v)?.canonical())
}

/// `d(0, H(sigma))`, equal to the distance to infeasibility when the strong
/// Slater condition holds.
pub fn distance_to_infeasibility(n: usize, system: &[Constraint], tol: &Tolerances) -> Result<f64> {
    let rows: Vec<_> = system.iter().map(Constraint::row).collect();
    match slater_constant(n, &rows, tol)? {
        Slater::Certified(_) => Ok(dist_origin_to_hset(&build_h(system)?)),
        Slater::NoSlater { rho } => Err(Error::SlaterFailed { rho }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InteriorSolvability {
    pub interior: bool,
    pub slater_rho: f64,
    pub status: Status,
    pub nu: f64,
    pub bounded_optimal_face: bool,
    /// Name of the first failing condition.
    pub failure: Option<String>,
}

/// Strong Slater plus a non-empty bounded optimal set.
pub fn check_interior_solvable(p: &LsioProblem, tol: &Tolerances) -> Result<InteriorSolvability> {
    let slater = slater_constant(p.n(), &p.rows(), tol)?;
    let solved = p.solve(tol)?;
    let bounded = solved.status == Status::Optimal && optimal_face_bounded(&p.to_lp(), tol)?;
    let failure = if slater.certificate().is_none() {
        Some("strong Slater condition".to_string())
    } else if solved.status != Status::Optimal {
        Some(format!("optimal set is empty (status {:?})", solved.status))
    } else if !bounded {
        Some("optimal set is unbounded".to_string())
    } else {
        None
    };
    Ok(InteriorSolvability {
        interior: failure.is_none(),
        slater_rho: slater.rho(),
        status: solved.status,
        nu: solved.value,
        bounded_optimal_face: bounded,
        failure,
    })
}

/// The two terms of the distance to the boundary of the solvable set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BdSolvable {
    pub dist_infeas: f64,
    pub d_z: f64,
    /// Whether `d_z` came from the sampled fallback.
    pub d_z_estimated: bool,
}

impl BdSolvable {
    pub fn value(&self) -> f64 {
        self.dist_infeas.min(self.d_z)
    }
}

pub fn bd_solvable_terms(p: &LsioProblem, tol: &Tolerances) -> Result<BdSolvable> {
    let p = &p.canonical();
    let check = check_interior_solvable(p, tol)?;
    if let Some(f) = check.failure {
        return Err(Error::NotInteriorSolvable(f));
    }
    let dist_infeas = dist_origin_to_hset(&build_h(&p.constraints)?);
    let z = inradius_at_origin(&build_zminus(p)?, tol)
        .map_err(|e| Error::NotInteriorSolvable(format!("Z^- does not contain the origin in its interior: {e}")))?;
    let terms = BdSolvable { dist_infeas, d_z: z.value, d_z_estimated: z.estimated };
    if terms.value() <= tol.boundary {
        return Err(Error::NotInteriorSolvable(format!("within {} of the boundary of the solvable set", tol.boundary)));
    }
    Ok(terms)
}

/// `min(d(0, bd H), d(0, bd Z^-))`.
pub fn distance_to_bd_solvable(p: &LsioProblem, tol: &Tolerances) -> Result<f64> {
    Ok(bd_solvable_terms(p, tol)?.value())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityConstants {
    pub epsilon: f64,
    pub nu: f64,
    pub cost_norm: f64,
    pub sup_r: f64,
    pub d_z: f64,
    pub d_z_estimated: bool,
    pub dist_infeas: f64,
    pub dist_bd_solvable: f64,
    pub rho_hat: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
}

impl StabilityConstants {
    pub fn fields(&self) -> [(&'static str, f64); 12] {
        [
            ("epsilon", self.epsilon),
            ("nu", self.nu),
            ("costNorm", self.cost_norm),
            ("supR", self.sup_r),
            ("dZ", self.d_z),
            ("distInfeas", self.dist_infeas),
            ("distBdSolvable", self.dist_bd_solvable),
            ("rhoHat", self.rho_hat),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("L", self.lipschitz),
        ]
    }
}

/// All constants of `L(pi, eps)`. `eps` defaults to half the distance to
/// the boundary of the solvable set.
pub fn lipschitz_constant(p: &LsioProblem, eps: Option<f64>, tol: &Tolerances) -> Result<StabilityConstants> {
    let p = p.canonical();
    let terms = bd_solvable_terms(&p, tol)?;
    let limit = terms.value();
    let eps = eps.unwrap_or(0.5 * limit);
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    if eps >= limit {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    let nu = p.solve(tol)?.value;
    let sup_r = sup_r(&p, nu)?;
    let cost_norm = norm(&p.cost);
    let (dinf, dz) = (terms.dist_infeas, terms.d_z);
    assert!(dinf - eps > 0.0 && dz - eps > 0.0);

    let rho_hat = sup_r / dz;
    let beta = psi(rho_hat) / (dinf - eps);
    let gamma = phi(0.0) * (rho_hat + eps * beta) + cost_norm * beta;
    let mu = phi(0.0) * (sup_r + eps * gamma.max(1.0)) / (dz - eps);
    let lipschitz = phi(0.0) * ((eps + cost_norm) * psi(mu) / (dinf - eps) + mu);

    let c = StabilityConstants {
        epsilon: eps,
        nu,
        cost_norm,
        sup_r,
        d_z: dz,
        d_z_estimated: terms.d_z_estimated,
        dist_infeas: dinf,
        dist_bd_solvable: limit,
        rho_hat,
        beta,
        gamma,
        mu,
        lipschitz,
    };
    if c.fields().iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::NumericalBreakdown(format!("non-finite stability constant: {c:?}")));
    }
    Ok(c)
}

/// Robust counterpart of `rp` plus the trivial row `(0_n, -rho)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedCounterpart {
    pub problem: LsioProblem,
    /// Slack of the trivial row; a valid strong Slater constant of `rp`.
    pub rho: f64,
    /// Largest certified Slater constant of the counterpart.
    pub rho_max: f64,
}

/// Any `0 < rho <= rho*` is admissible; `rho` is taken as
/// `min(rho*, d(0, H))` so a capped Slater LP does not inflate `sup R`.
pub fn augmented_counterpart(rp: &RobustProblem, tol: &Tolerances) -> Result<AugmentedCounterpart> {
    let base = robust_counterpart(rp)?;
    let slater = slater_constant(base.n(), &base.rows(), tol)?;
    let cert =
        slater.certificate().ok_or_else(|| Error::HypothesisViolated(format!("strong Slater condition (rho* = {})", slater.rho())))?;
    let rho = if base.constraints.is_empty() { cert.rho } else { cert.rho.min(dist_origin_to_hset(&build_h(&base.constraints)?)) };
    let mut label = RHO_LABEL.to_string();
    while base.constraints.iter().any(|c| c.label == label) {
        label.push('_');
    }
    let problem = base.with_constraint(Constraint::new(label, vec![0.0; base.n()], -rho))?;
    Ok(AugmentedCounterpart { problem, rho, rho_max: cert.rho })
}

/// Precomputed data for checking `|nu(U) - nu(V)| <= L(U, eps) d_nat(U, V)`
/// against many `V`.
#[derive(Clone, Debug)]
pub struct ValueLipschitz {
    pub u: RobustProblem,
    pub augmented: AugmentedCounterpart,
    pub constants: StabilityConstants,
    pub nu_u: f64,
    tol: Tolerances,
}

impl ValueLipschitz {
    pub fn new(rp_u: &RobustProblem, eps: Option<f64>, tol: &Tolerances) -> Result<Self> {
        let augmented = augmented_counterpart(rp_u, tol)?;
        let check = check_interior_solvable(&augmented.problem, tol)?;
        if let Some(f) = check.failure {
            return Err(Error::HypothesisViolated(f));
        }
        let constants = lipschitz_constant(&augmented.problem, eps, tol).map_err(|e| match e {
            Error::EpsilonTooLarge { .. } => e,
            other => Error::HypothesisViolated(format!("interior solvability of the augmented counterpart: {other}")),
        })?;
        let nu_u = robust_counterpart(rp_u)?.solve(tol)?.value;
        Ok(Self { u: rp_u.clone(), augmented, constants, nu_u, tol: *tol })
    }

    pub fn check(&self, rp_v: &RobustProblem) -> Result<CertificateReport> {
        let d = constraintwise_distance(&self.u, rp_v)?;
        if !(d.value < self.constants.epsilon) {
            return Err(Error::HypothesisViolated(format!("d_nat(U, V) = {} is not below epsilon = {}", d.value, self.constants.epsilon)));
        }
        let v = robust_counterpart(rp_v)?.solve(&self.tol)?;
        let measured = if v.status == Status::Optimal { (self.nu_u - v.value).abs() } else { f64::INFINITY };
        let bound = self.constants.lipschitz * d.value;
        Ok(CertificateReport::upper("valueLipschitz", bound, measured, self.tol.report)
            .with("dNat", d.value)
            .with("L", self.constants.lipschitz)
            .with("epsilon", self.constants.epsilon)
            .with("nuU", self.nu_u)
            .with("nuV", v.value)
            .with("statusV", v.status)
            .with("rho", self.augmented.rho))
    }
}

pub fn check_value_lipschitz(rp_u: &RobustProblem, rp_v: &RobustProblem, eps: Option<f64>, tol: &Tolerances) -> Result<CertificateReport> {
    ValueLipschitz::new(rp_u, eps, tol)?.check(rp_v)
}
