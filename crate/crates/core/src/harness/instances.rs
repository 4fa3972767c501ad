//! Random robust problems satisfying the strong Slater condition with a
//! bounded optimal set.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::perturb::{random_in_ball, random_unit};
use crate::error::{Error, Result};
use crate::geometry::{contains_origin_interior, Polytope};
use crate::model::RobustProblem;
use crate::stability::ValueLipschitz;
use crate::tolerance::Tolerances;
use crate::vecops::{dot, stack};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceSpec {
    pub n: usize,
    pub constraints: usize,
    /// Extra points per uncertainty set around the nominal row.
    pub jitter_points: usize,
    pub jitter_radius: f64,
}

impl InstanceSpec {
    pub fn new(n: usize) -> Self {
        Self { n, constraints: n + 2, jitter_points: 3, jitter_radius: 0.2 }
    }
}

/// Nominal rows are unit normals whose hull contains the origin in its
/// interior, so every cost has a bounded optimal set; the right-hand sides
/// leave slack 1 at a random centre.
pub fn random_robust_problem(rng: &mut ChaCha8Rng, spec: &InstanceSpec, tol: &Tolerances) -> Result<RobustProblem> {
    let n = spec.n;
    if spec.constraints < n + 1 {
        return Err(Error::InvalidInput("need at least n + 1 constraints".into()));
    }
    let normals = loop {
        let a: Vec<Vec<f64>> = (0..spec.constraints).map(|_| random_unit(rng, n)).collect();
        let test = contains_origin_interior(&Polytope::new(a.clone())?, tol)?;
        if test.interior && test.margin > 0.05 {
            break a;
        }
    };
    let centre = random_in_ball(rng, n, 1.0);
    let cost: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let sets = normals
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let nominal = stack(a, dot(a, &centre) - 1.0);
            let mut vertices = vec![nominal.clone()];
            for _ in 0..spec.jitter_points {
                let d = random_in_ball(rng, n + 1, spec.jitter_radius);
                vertices.push(nominal.iter().zip(&d).map(|(x, y)| x + y).collect());
            }
            Ok((format!("c{k}"), Polytope::new(vertices)?))
        })
        .collect::<Result<Vec<_>>>()?;
    RobustProblem::fixed(cost, sets)
}

/// Draws until the Lipschitz hypotheses are certified.
pub fn random_certified_instance(
    rng: &mut ChaCha8Rng,
    spec: &InstanceSpec,
    eps: Option<f64>,
    tol: &Tolerances,
) -> Result<(RobustProblem, ValueLipschitz)> {
    let mut last = None;
    for _ in 0..100 {
        let rp = random_robust_problem(rng, spec, tol)?;
        match ValueLipschitz::new(&rp, eps, tol) {
            Ok(ctx) => return Ok((rp, ctx)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::HypothesisViolated("no certified instance found".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn instances_are_certified() {
        let tol = Tolerances::default();
        for n in 1..=3 {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let (rp, ctx) = random_certified_instance(&mut rng, &InstanceSpec::new(n), None, &tol).unwrap();
            assert_eq!(rp.n(), n);
            assert!(ctx.constants.lipschitz.is_finite() && ctx.constants.lipschitz > 0.0);
        }
    }
}
