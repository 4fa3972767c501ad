//! Interior test and inradius of a V-polytope around the origin, both through
//! the polar set `{y : <v_i, y> <= 1}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::halfspace::{HPolytope, MAX_ENUM_DIM};
use super::{project_onto_polytope, Polytope};
use crate::error::{Error, Result};
use crate::lp::{solve, LinearProgram, Row, Status};
use crate::tolerance::Tolerances;
use crate::vecops::{dot, norm};

pub const MAX_ENUM_GENERATORS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorTest {
    pub interior: bool,
    /// Radius of a centred ball inside the polytope; 0 when not interior.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inradius {
    pub value: f64,
    /// Set when the direction sweep replaced exact enumeration. The sampled
    /// value is then an upper bound on the true radius.
    pub estimated: bool,
}

/// The polar is bounded iff the origin is interior, checked by maximizing
/// `+-y_j` over it.
fn polar_bounded(p: &Polytope, tol: &Tolerances) -> Result<bool> {
    let d = p.dim();
    let rows: Vec<Row> = p.vertices().iter().map(|v| Row::new(v.iter().map(|x| -x).collect(), -1.0)).collect();
    for j in 0..d {
        for s in [1.0, -1.0] {
            let mut cost = vec![0.0; d];
            cost[j] = -s;
            let r = solve(&LinearProgram::new(cost, rows.clone()), tol)?;
            if r.status != Status::Optimal {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn contains_origin_interior(p: &Polytope, tol: &Tolerances) -> Result<InteriorTest> {
    let not_interior = InteriorTest { interior: false, margin: 0.0 };
    if !polar_bounded(p, tol)? {
        return Ok(not_interior);
    }
    let r = radius_unchecked(p, tol)?;
    if r.value > tol.geometry {
        Ok(InteriorTest { interior: true, margin: r.value })
    } else {
        Ok(not_interior)
    }
}

/// Radius of the largest ball centred at the origin inside `conv(P)`.
pub fn inradius_at_origin(p: &Polytope, tol: &Tolerances) -> Result<Inradius> {
    let on_boundary = || -> Result<Error> {
        let d0 = project_onto_polytope(&vec![0.0; p.dim()], p)?.dist;
        Ok(if d0 <= tol.geometry { Error::UnboundedPolar } else { Error::OriginNotInterior })
    };
    if !polar_bounded(p, tol)? {
        return Err(on_boundary()?);
    }
    let r = radius_unchecked(p, tol)?;
    if r.value <= tol.geometry {
        return Err(on_boundary()?);
    }
    Ok(r)
}

fn radius_unchecked(p: &Polytope, tol: &Tolerances) -> Result<Inradius> {
    let canon = p.canonical();
    let gens: Vec<Vec<f64>> = canon.vertices().iter().filter(|v| norm(v) > 0.0).cloned().collect();
    if gens.is_empty() {
        return Ok(Inradius { value: 0.0, estimated: false });
    }
    let d = p.dim();
    if d <= MAX_ENUM_DIM && gens.len() <= MAX_ENUM_GENERATORS {
        let polar = HPolytope::new(d, gens.into_iter().map(|v| (v, 1.0)).collect())?;
        let verts = polar.vertices(tol.feasibility)?;
        let far = verts.iter().map(|y| norm(y)).fold(0.0f64, f64::max);
        let value = if far > 0.0 { 1.0 / far } else { 0.0 };
        return Ok(Inradius { value, estimated: false });
    }
    Ok(Inradius { value: direction_sweep(&gens, d).max(0.0), estimated: true })
}

/// `min_u max_i <v_i, u>` over sampled unit directions, polished by a
/// shrinking random local search.
fn direction_sweep(gens: &[Vec<f64>], d: usize) -> f64 {
    let support = |u: &[f64]| gens.iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d1a);
    let random_unit = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let n = norm(&u);
            if n > 1e-12 {
                return u.iter().map(|x| x / n).collect();
            }
        }
    };
    let mut best_u = random_unit(&mut rng);
    let mut best = support(&best_u);
    for _ in 0..2000 * d {
        let u = random_unit(&mut rng);
        let h = support(&u);
        if h < best {
            best = h;
            best_u = u;
        }
    }
    let mut step = 0.1;
    while step > 1e-10 {
        let mut improved = false;
        for _ in 0..20 * d {
            let dir = random_unit(&mut rng);
            let cand: Vec<f64> = best_u.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            let n = norm(&cand);
            let cand: Vec<f64> = cand.iter().map(|x| x / n).collect();
            let h = support(&cand);
            if h < best {
                best = h;
                best_u = cand;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}
