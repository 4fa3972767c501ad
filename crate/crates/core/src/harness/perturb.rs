//! Perturbations of uncertainty sets with a guaranteed Hausdorff radius.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Polytope;
use crate::model::RobustProblem;
use crate::vecops::{dist, norm};

/// Every kind moves a set by at most `magnitude` in Hausdorff distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PerturbationKind {
    Translate,
    Scale,
    VertexJitter,
    ShrinkToPoint,
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&u);
        if n > 1e-12 {
            return u.iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point of the ball of radius `r`.
pub fn random_in_ball(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    let u = random_unit(rng, dim);
    let s = r * rng.random::<f64>().powf(1.0 / dim as f64);
    u.iter().map(|x| x * s).collect()
}

fn radius_about(p: &Polytope, center: &[f64]) -> f64 {
    p.vertices().iter().map(|v| dist(v, center)).fold(0.0, f64::max)
}

pub fn perturb_set(p: &Polytope, kind: PerturbationKind, magnitude: f64, rng: &mut ChaCha8Rng) -> Result<Polytope> {
    let dim = p.dim();
    match kind {
        PerturbationKind::Translate => {
            let w: Vec<f64> = random_unit(rng, dim).iter().map(|x| x * magnitude).collect();
            Ok(p.translate(&w))
        }
        PerturbationKind::Scale => {
            let c = p.centroid();
            let r = radius_about(p, &c);
            if r == 0.0 {
                return Ok(p.clone());
            }
            let grow = rng.random::<bool>();
            let s = if grow { 1.0 + magnitude / r } else { (1.0 - magnitude / r).max(0.0) };
            Ok(p.scale_about(&c, s))
        }
        PerturbationKind::VertexJitter => {
            let vertices = p
                .vertices()
                .iter()
                .map(|v| {
                    let d = random_in_ball(rng, dim, magnitude);
                    v.iter().zip(&d).map(|(a, b)| a + b).collect()
                })
                .collect();
            Polytope::new(vertices)
        }
        PerturbationKind::ShrinkToPoint => {
            let c = p.centroid();
            let r = radius_about(p, &c);
            if r == 0.0 {
                return Ok(p.clone());
            }
            Ok(p.scale_about(&c, (1.0 - magnitude / r).max(0.0)))
        }
    }
}

/// Applies the perturbation to every uncertainty set.
pub fn perturb_problem(rp: &RobustProblem, kind: PerturbationKind, magnitude: f64, rng: &mut ChaCha8Rng) -> Result<RobustProblem> {
    rp.map_sets(|_, s| perturb_set(s, kind, magnitude, rng))
}
