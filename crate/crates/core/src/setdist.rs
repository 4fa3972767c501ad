//! ε-optimal solution sets, the truncated set distances `d_r` and `d̂_r`,
//! and the Lipschitz bound for ε-argmin sets of robust problems.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, min_norm_point, project_onto_polytope, HPolytope, Polytope};
use crate::lp::{optimal_face_bounded, Row, Status};
use crate::model::{constraintwise_distance, robust_counterpart, LsioProblem, RobustProblem};
use crate::report::CertificateReport;
use crate::stability::{augmented_counterpart, bd_solvable_terms, check_interior_solvable};
use crate::tolerance::Tolerances;
use crate::vecops::{dot, norm, norm_sq};

/// `{x feasible : <c, x> <= nu + eps}` in H-representation.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsArgmin {
    pub rows: Vec<Row>,
    pub cost: Vec<f64>,
    pub epsilon: f64,
    pub nu: f64,
    /// An optimal point, certifying non-emptiness.
    pub optimal_point: Vec<f64>,
}

pub fn eps_argmin(p: &LsioProblem, eps: f64, tol: &Tolerances) -> Result<EpsArgmin> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    let r = p.solve(tol)?;
    let (Status::Optimal, Some(x)) = (r.status, r.solution) else {
        return Err(Error::NotSolvable);
    };
    Ok(EpsArgmin { rows: p.rows(), cost: p.cost.clone(), epsilon: eps, nu: r.value, optimal_point: x })
}

impl EpsArgmin {
    pub fn dim(&self) -> usize {
        self.cost.len()
    }

    /// Feasible rows plus the level row, as `<a, x> <= b`.
    pub fn halfspaces(&self) -> Result<HPolytope> {
        let mut rows: Vec<(Vec<f64>, f64)> = self.rows.iter().map(|r| (r.a.iter().map(|v| -v).collect(), -r.b)).collect();
        rows.push((self.cost.clone(), self.nu + self.epsilon));
        HPolytope::new(self.dim(), rows)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| r.slack(x) >= -tol) && dot(&self.cost, x) <= self.nu + self.epsilon + tol
    }

    /// Vertex description; the set must be bounded.
    pub fn to_polytope(&self, tol: &Tolerances) -> Result<Polytope> {
        self.halfspaces()?.to_polytope(tol.feasibility)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncatedDistParams {
    pub r: f64,
    pub r0: f64,
    pub grid_resolution: f64,
    pub direction_count: usize,
    pub seed: u64,
}

impl TruncatedDistParams {
    pub fn new(r: f64, r0: f64) -> Result<Self> {
        let p = Self { r, r0, grid_resolution: 0.05, direction_count: 256, seed: 0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r > self.r0 && self.r.is_finite()) {
            return Err(Error::InvalidInput(format!("need r > r0 > 0, got r = {}, r0 = {}", self.r, self.r0)));
        }
        if !(self.grid_resolution > 0.0) {
            return Err(Error::InvalidInput("grid resolution must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncatedDistance {
    pub value: f64,
    /// Maximum over points known to lie in the truncated sets; never above
    /// the true value.
    pub lower_bound: f64,
    /// True when the truncation cut through a set in dimension >= 2, so the
    /// candidate points may miss the maximizer.
    pub estimated: bool,
}

fn unit_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    while out.len() < count {
        let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = norm(&u);
        if n > 1e-12 {
            out.push(u.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Points where the segment `[p, q]` meets the sphere of radius `r`.
fn segment_sphere(p: &[f64], q: &[f64], r: f64) -> Vec<Vec<f64>> {
    let d: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let a = norm_sq(&d);
    if a == 0.0 {
        return Vec::new();
    }
    let b = 2.0 * dot(p, &d);
    let c = norm_sq(p) - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
        .into_iter()
        .filter(|t| (0.0..=1.0).contains(t))
        .map(|t| p.iter().zip(&d).map(|(x, y)| x + t * y).collect())
        .collect()
}

/// Candidate points of `C ∩ rB`: vertices inside the ball, sphere crossings
/// of vertex segments, and sphere points in sampled directions.
fn truncated_candidates(c: &Polytope, r: f64, dirs: &[Vec<f64>], tol: f64) -> (Vec<Vec<f64>>, bool) {
    let verts = c.vertices();
    let mut cands: Vec<Vec<f64>> = verts.iter().filter(|v| norm(v) <= r).cloned().collect();
    let cut = cands.len() < verts.len();
    if cut {
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                cands.extend(segment_sphere(&verts[i], &verts[j], r));
            }
        }
        for u in dirs {
            let x: Vec<f64> = u.iter().map(|v| v * r).collect();
            if project_onto_polytope(&x, c).map(|p| p.dist <= tol).unwrap_or(false) {
                cands.push(x);
            }
        }
    }
    (cands, cut)
}

/// `e(C ∩ rB, D)` from candidate points.
fn truncated_excess(c: &Polytope, d: &Polytope, r: f64, dirs: &[Vec<f64>], tol: f64) -> Result<(f64, bool)> {
    let (cands, cut) = truncated_candidates(c, r, dirs, tol);
    let mut e = 0.0f64;
    for x in &cands {
        e = e.max(project_onto_polytope(x, d)?.dist);
    }
    Ok((e, cut && c.dim() > 1))
}

/// `d̂_r(C, D) = max{e(C ∩ rB, D), e(D ∩ rB, C)}`.
pub fn truncated_hausdorff(c: &Polytope, d: &Polytope, params: &TruncatedDistParams, tol: &Tolerances) -> Result<TruncatedDistance> {
    if c.dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: d.dim() });
    }
    if c.canonical() == d.canonical() {
        return Ok(TruncatedDistance { value: 0.0, lower_bound: 0.0, estimated: false });
    }
    let dirs = unit_directions(c.dim(), params.direction_count, params.seed);
    let (e1, est1) = truncated_excess(c, d, params.r, &dirs, tol.geometry)?;
    let (e2, est2) = truncated_excess(d, c, params.r, &dirs, tol.geometry)?;
    let v = e1.max(e2);
    Ok(TruncatedDistance { value: v, lower_bound: v, estimated: est1 || est2 })
}

/// `d̂_r` for intervals through its defining infimum: the smallest `eta`
/// with `C ∩ [-r, r] ⊆ D + eta B` and vice versa.
pub fn truncated_hausdorff_inf_form_1d(c: (f64, f64), d: (f64, f64), r: f64) -> f64 {
    let covered = |x: (f64, f64), y: (f64, f64), eta: f64| {
        let lo = x.0.max(-r);
        let hi = x.1.min(r);
        lo > hi || (lo >= y.0 - eta && hi <= y.1 + eta)
    };
    let ok = |eta: f64| covered(c, d, eta) && covered(d, c, eta);
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    if ok(lo) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DrEstimate {
    pub value: f64,
    /// Bound on `d_r - value` from the grid spacing.
    pub error_bound: f64,
}

/// `d_r(C, D) = max_{|x| <= r} |d(x, C) - d(x, D)|` by grid and sphere
/// sampling. The integrand is 2-Lipschitz.
pub fn d_r_metric(c: &Polytope, d: &Polytope, params: &TruncatedDistParams) -> Result<DrEstimate> {
    if c.dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: d.dim() });
    }
    let dim = c.dim();
    let r = params.r;
    let h = params.grid_resolution;
    let steps = (2.0 * r / h).ceil() as usize;
    let gap = |x: &[f64]| -> Result<f64> { Ok((project_onto_polytope(x, c)?.dist - project_onto_polytope(x, d)?.dist).abs()) };
    let mut best = 0.0f64;
    let mut idx = vec![0usize; dim];
    'grid: loop {
        let x: Vec<f64> = idx.iter().map(|&i| -r + (i as f64) * 2.0 * r / steps as f64).collect();
        if norm(&x) <= r {
            best = best.max(gap(&x)?);
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i <= steps {
                continue 'grid;
            }
            *i = 0;
        }
        break;
    }
    for u in unit_directions(dim, params.direction_count, params.seed) {
        let x: Vec<f64> = u.iter().map(|v| v * r).collect();
        best = best.max(gap(&x)?);
    }
    let spacing = 2.0 * r / steps as f64;
    Ok(DrEstimate { value: best, error_bound: spacing * (dim as f64).sqrt() })
}

/// `(1 + 4r/eps)(1 + |c|)(1 + r)sqrt(1 + r^2) / (distInfeas - eta)`.
pub fn eps_argmin_bound(eta: f64, r: f64, eps: f64, c_norm: f64, dist_infeas: f64) -> Result<f64> {
    if !(eta > 0.0) || !(r > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidInput("eta, r and eps must be positive".into()));
    }
    let denom = dist_infeas - eta;
    let k = (1.0 + 4.0 * r / eps) * (1.0 + c_norm) * (1.0 + r) * (1.0 + r * r).sqrt() / denom;
    if !(denom > 0.0) || !k.is_finite() {
        return Err(Error::EtaTooLarge { eta, limit: dist_infeas });
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EpsArgminCheck {
    pub report: CertificateReport,
    pub d_hat: TruncatedDistance,
    /// Untruncated Hausdorff distance between the two ε-argmin sets.
    pub hausdorff: f64,
    pub r0: f64,
    pub r: f64,
    pub d_nat: f64,
    pub coefficient: f64,
}

/// Checks `d̂_r(ε-argmin RO(U), ε-argmin RO(V)) <= K d_nat(U, V)`.
///
/// `r0` defaults to `max(|x*_U|, |x*_V|, |nu_U|, |nu_V|) + 1` and `r` to
/// `2 r0`.
pub fn check_eps_argmin_lipschitz(
    rp_u: &RobustProblem,
    rp_v: &RobustProblem,
    eta: f64,
    eps: f64,
    r: Option<f64>,
    r0: Option<f64>,
    tol: &Tolerances,
) -> Result<EpsArgminCheck> {
    let aug = augmented_counterpart(rp_u, tol)?;
    let interior = check_interior_solvable(&aug.problem, tol)?;
    if let Some(f) = interior.failure {
        return Err(Error::HypothesisViolated(f));
    }
    let terms = bd_solvable_terms(&aug.problem, tol).map_err(|e| Error::HypothesisViolated(format!("interior solvability: {e}")))?;
    if !(eta > 0.0) || eta >= terms.value() {
        return Err(Error::EtaTooLarge { eta, limit: terms.value() });
    }
    let d_nat = constraintwise_distance(rp_u, rp_v)?.value;
    if !(d_nat < eta) {
        return Err(Error::HypothesisViolated(format!("d_nat(U, V) = {d_nat} is not below eta = {eta}")));
    }
    let pu = robust_counterpart(rp_u)?;
    let pv = robust_counterpart(rp_v)?;
    let au = eps_argmin(&pu, eps, tol)?;
    let av = eps_argmin(&pv, eps, tol).map_err(|_| Error::HypothesisViolated("RO(V) is not solvable".into()))?;
    if !optimal_face_bounded(&pv.to_lp(), tol)? {
        return Err(Error::HypothesisViolated("optimal set of RO(V) is unbounded".into()));
    }
    let cu = au.to_polytope(tol)?;
    let cv = av.to_polytope(tol)?;

    let r0 = r0.unwrap_or_else(|| norm(&au.optimal_point).max(norm(&av.optimal_point)).max(au.nu.abs()).max(av.nu.abs()) + 1.0);
    for (name, set, nu) in [("U", &cu, au.nu), ("V", &cv, av.nu)] {
        let closest = min_norm_point(set.vertices()).norm();
        if !(closest <= r0) {
            return Err(Error::HypothesisViolated(format!("r0 ball misses the eps-argmin set of RO({name})")));
        }
        if !(nu > -r0) {
            return Err(Error::HypothesisViolated(format!("nu(RO({name})) = {nu} is not above -r0")));
        }
    }
    let r = r.unwrap_or(2.0 * r0);
    let params = TruncatedDistParams::new(r, r0)?;
    let d_hat = truncated_hausdorff(&cu, &cv, &params, tol)?;
    let dh = hausdorff(&cu, &cv)?;
    let coefficient = eps_argmin_bound(eta, r, eps, norm(&pu.cost), terms.dist_infeas)?;
    let bound = coefficient * d_nat;
    let report = CertificateReport::upper("epsArgminLipschitz", bound, d_hat.lower_bound, tol.report)
        .with("dNat", d_nat)
        .with("eta", eta)
        .with("epsilon", eps)
        .with("r", r)
        .with("r0", r0)
        .with("distInfeas", terms.dist_infeas)
        .with("estimated", d_hat.estimated);
    Ok(EpsArgminCheck { report, d_hat, hausdorff: dh, r0, r, d_nat, coefficient })
}
