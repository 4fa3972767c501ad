//! Sampled realization of the RO-LSIO transformations `sigma_{U;V}`: the
//! index set `T` is uncountable, so the identity
//! `delta^Pi(pi_{U;V}, pi_{V;U}) = d_H(U, V)` is checked on sampled index
//! points together with every vertex of `U` and `V`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, project_onto_polytope, Polytope};
use crate::lp::slater_constant;
use crate::model::{robust_counterpart, Constraint, LsioProblem, RobustProblem};
use crate::report::CertificateReport;
use crate::tolerance::Tolerances;
use crate::vecops::{dist, stack};

/// Width of the band above the membership tolerance in which samples are
/// redrawn.
pub const AMBIGUITY_BAND: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Region {
    Both,
    OnlyU,
    OnlyV,
    Neither,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Both, Region::OnlyU, Region::OnlyV, Region::Neither];

    fn index(self) -> usize {
        self as usize
    }
}

/// Membership of `t` in `U` and `V`, with distances.
#[derive(Clone, Debug, PartialEq)]
struct Membership {
    region: Region,
    proj_u: Vec<f64>,
    proj_v: Vec<f64>,
    ambiguous: bool,
}

fn membership(t: &[f64], u: &Polytope, v: &Polytope, tol: f64) -> Result<Membership> {
    let pu = project_onto_polytope(t, u)?;
    let pv = project_onto_polytope(t, v)?;
    let in_u = pu.dist <= tol;
    let in_v = pv.dist <= tol;
    let near = |d: f64| d > tol && d <= tol + AMBIGUITY_BAND;
    let region = match (in_u, in_v) {
        (true, true) => Region::Both,
        (true, false) => Region::OnlyU,
        (false, true) => Region::OnlyV,
        (false, false) => Region::Neither,
    };
    Ok(Membership { region, proj_u: pu.point, proj_v: pv.point, ambiguous: near(pu.dist) || near(pv.dist) })
}

/// `sigma_{U;V}(t)` without the right-hand side: `t` on `U`, its projection
/// onto `U` on `V \ U`, and `None` (the trivial row) elsewhere.
fn sigma_point(m: &Membership, t: &[f64], left_is_u: bool) -> Option<Vec<f64>> {
    let (in_own, in_other, proj_own) = match (left_is_u, m.region) {
        (true, r) => (matches!(r, Region::Both | Region::OnlyU), r == Region::OnlyV, &m.proj_u),
        (false, r) => (matches!(r, Region::Both | Region::OnlyV), r == Region::OnlyU, &m.proj_v),
    };
    if in_own {
        Some(t.to_vec())
    } else if in_other {
        Some(proj_own.clone())
    } else {
        None
    }
}

/// `sigma_{U;V}(t)` as a stacked `(a, b)` vector, for a fixed right-hand
/// side `b` and trivial-row constant `rho`.
pub fn eval_sigma_uv(t: &[f64], u: &Polytope, v: &Polytope, b: f64, rho: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let m = membership(t, u, v, tol.geometry)?;
    Ok(match sigma_point(&m, t, true) {
        Some(a) => stack(&a, b),
        None => stack(&vec![0.0; t.len()], -rho),
    })
}

/// Multi-constraint variant: the index point is `(t, s)` in `R^{n+1}` and
/// the value is a point of `U_alpha`, or `(0_n, -rho)`.
pub fn eval_sigma_multi(ts: &[f64], u: &Polytope, v: &Polytope, rho: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let m = membership(ts, u, v, tol.geometry)?;
    Ok(sigma_point(&m, ts, true).unwrap_or_else(|| trivial_row(ts.len(), rho)))
}

fn trivial_row(dim: usize, rho: f64) -> Vec<f64> {
    let mut r = vec![0.0; dim];
    r[dim - 1] = -rho;
    r
}

/// `sigma_{U;V}(t)` and `sigma_{V;U}(t)` at one index point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexedEval {
    pub index_point: Vec<f64>,
    pub region: Region,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub gap: f64,
}

/// Index points to evaluate: every vertex of both sets, plus random points
/// per region drawn from the sets and from a box around them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SamplePlan {
    pub seed: u64,
    /// Targets for the regions `U∩V`, `U\V`, `V\U`, outside both.
    pub count_per_region: [usize; 4],
    /// Inflation of the bounding box of `U ∪ V`.
    pub margin: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self { seed: 0, count_per_region: [50, 50, 50, 50], margin: 0.5 }
    }
}

impl SamplePlan {
    pub fn bounding_box(&self, u: &Polytope, v: &Polytope) -> (Vec<f64>, Vec<f64>) {
        let (lu, hu) = u.bounding_box();
        let (lv, hv) = v.bounding_box();
        let lo = lu.iter().zip(&lv).map(|(a, b)| a.min(*b) - self.margin).collect();
        let hi = hu.iter().zip(&hv).map(|(a, b)| a.max(*b) + self.margin).collect();
        (lo, hi)
    }
}

fn random_convex_combination(rng: &mut ChaCha8Rng, p: &Polytope) -> Vec<f64> {
    let w: Vec<f64> = (0..p.len()).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = w.iter().sum();
    let mut x = vec![0.0; p.dim()];
    for (v, wi) in p.vertices().iter().zip(&w) {
        for (xk, vk) in x.iter_mut().zip(v) {
            *xk += vk * wi / s;
        }
    }
    x
}

/// Index points for a plan: vertices first, then sampled points.
pub fn sample_index_points(u: &Polytope, v: &Polytope, plan: &SamplePlan, stream: u64, tol: &Tolerances) -> Result<Vec<Vec<f64>>> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    let mut points: Vec<Vec<f64>> = u.vertices().iter().chain(v.vertices()).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(stream);
    let (lo, hi) = plan.bounding_box(u, v);
    let mut filled = [0usize; 4];
    let total: usize = plan.count_per_region.iter().sum();
    let mut attempts = 0;
    while filled.iter().zip(&plan.count_per_region).any(|(f, c)| f < c) && attempts < 10 * total {
        attempts += 1;
        let t = match attempts % 3 {
            0 => random_convex_combination(&mut rng, u),
            1 => random_convex_combination(&mut rng, v),
            _ => lo.iter().zip(&hi).map(|(a, b)| rng.random_range(*a..=*b)).collect(),
        };
        let m = membership(&t, u, v, tol.geometry)?;
        if m.ambiguous {
            continue;
        }
        let k = m.region.index();
        if filled[k] < plan.count_per_region[k] {
            filled[k] += 1;
            points.push(t);
        }
    }
    Ok(points)
}

fn evaluate(t: &[f64], u: &Polytope, v: &Polytope, tail: Option<f64>, rho: f64, tol: &Tolerances) -> Result<IndexedEval> {
    let m = membership(t, u, v, tol.geometry)?;
    let finish = |x: Option<Vec<f64>>| match (x, tail) {
        (Some(a), Some(b)) => stack(&a, b),
        (Some(a), None) => a,
        (None, Some(_)) => trivial_row(t.len() + 1, rho),
        (None, None) => trivial_row(t.len(), rho),
    };
    let left = finish(sigma_point(&m, t, true));
    let right = finish(sigma_point(&m, t, false));
    Ok(IndexedEval { index_point: t.to_vec(), region: m.region, gap: dist(&left, &right), left, right })
}

/// Evaluates both transformations at every index point, in order.
pub fn evaluate_points(
    points: &[Vec<f64>],
    u: &Polytope,
    v: &Polytope,
    b: Option<f64>,
    rho: f64,
    tol: &Tolerances,
) -> Result<Vec<IndexedEval>> {
    points.par_iter().map(|t| evaluate(t, u, v, b, rho, tol)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TransformCheck {
    pub report: CertificateReport,
    pub samples_per_region: [usize; 4],
    pub evaluations: usize,
}

fn summarize(evals: &[IndexedEval]) -> (f64, [usize; 4]) {
    let mut counts = [0usize; 4];
    let mut sup = 0.0f64;
    for e in evals {
        counts[e.region.index()] += 1;
        sup = sup.max(e.gap);
    }
    (sup, counts)
}

/// Sampled `sup_t |sigma_{U;V}(t) - sigma_{V;U}(t)|` against `d_H(U, V)`.
pub fn verify_transform_distance(
    u: &Polytope,
    v: &Polytope,
    b: f64,
    rho: f64,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<TransformCheck> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
    }
    let points = sample_index_points(u, v, plan, 0, tol)?;
    let evals = evaluate_points(&points, u, v, Some(b), rho, tol)?;
    let (measured, counts) = summarize(&evals);
    let bound = hausdorff(u, v)?;
    let report = CertificateReport::equality("transformDistance", bound, measured, tol.report)
        .with("seed", plan.seed)
        .with("samplesPerRegion", counts);
    Ok(TransformCheck { report, samples_per_region: counts, evaluations: evals.len() })
}

/// Per-constraint version over `(t, s)` index points; the overall value is
/// the sup over constraints.
pub fn verify_transform_distance_multi(
    rp_u: &RobustProblem,
    rp_v: &RobustProblem,
    rho: f64,
    plan: &SamplePlan,
    tol: &Tolerances,
) -> Result<TransformCheck> {
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho must be positive, got {rho}")));
    }
    if rp_u.constraints().len() != rp_v.constraints().len() {
        return Err(Error::IndexMismatch("robust problems have different index sets".into()));
    }
    let mut measured = 0.0f64;
    let mut bound = 0.0f64;
    let mut counts = [0usize; 4];
    let mut evaluations = 0;
    let mut per = serde_json::Map::new();
    for (k, uc) in rp_u.constraints().iter().enumerate() {
        let vs = rp_v.set(&uc.name).ok_or_else(|| Error::IndexMismatch(format!("constraint '{}' missing from second problem", uc.name)))?;
        let points = sample_index_points(&uc.set, vs, plan, k as u64, tol)?;
        let evals = evaluate_points(&points, &uc.set, vs, None, rho, tol)?;
        let (m, c) = summarize(&evals);
        let h = hausdorff(&uc.set, vs)?;
        per.insert(uc.name.clone(), serde_json::json!({ "measured": m, "bound": h }));
        measured = measured.max(m);
        bound = bound.max(h);
        for i in 0..4 {
            counts[i] += c[i];
        }
        evaluations += evals.len();
    }
    let report = CertificateReport::equality("transformDistanceMulti", bound, measured, tol.report)
        .with("seed", plan.seed)
        .with("perConstraint", per);
    Ok(TransformCheck { report, samples_per_region: counts, evaluations })
}

/// Strong Slater constant of the robust counterpart of `rp`.
pub fn default_rho(rp: &RobustProblem, tol: &Tolerances) -> Result<f64> {
    let rc = robust_counterpart(rp)?;
    let s = slater_constant(rc.n(), &rc.rows(), tol)?;
    s.certificate().map(|c| c.rho).ok_or_else(|| Error::HypothesisViolated(format!("strong Slater condition (rho* = {})", s.rho())))
}

/// Finite LSIO whose rows are the `left` evaluations, labelled by position.
pub fn assemble_lsio(cost: Vec<f64>, evals: &[IndexedEval]) -> Result<LsioProblem> {
    let n = cost.len();
    let constraints = evals
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if e.left.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: e.left.len() });
            }
            Ok(Constraint::new(format!("t{i}"), e.left[..n].to_vec(), e.left[n]))
        })
        .collect::<Result<_>>()?;
    LsioProblem::new(cost, constraints)
}
