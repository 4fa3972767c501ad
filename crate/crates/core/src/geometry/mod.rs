//! Convex-polytope primitives: Euclidean projection, Hausdorff distances,
//! distance from the origin to the hypographical set `H`, and the inradius of
//! a polytope around the origin.
//!
//! Polytopes are stored by vertex list. Redundant (non-extreme or repeated)
//! vertices are allowed everywhere; [`Polytope::normalize`] removes exact
//! repeats but is never applied implicitly.

mod halfspace;
mod inradius;
mod minnorm;

pub use halfspace::HPolytope;
pub use inradius::{contains_origin_interior, inradius_at_origin, Inradius, InteriorTest};
pub use minnorm::{min_norm_point, MinNormPoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dist, lex_cmp, norm, sub};

/// Convex hull of a non-empty finite vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope", into = "RawPolytope")]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawPolytope {
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<RawPolytope> for Polytope {
    type Error = Error;
    fn try_from(raw: RawPolytope) -> Result<Self> {
        Polytope::new(raw.vertices)
    }
}

impl From<Polytope> for RawPolytope {
    fn from(p: Polytope) -> Self {
        RawPolytope { vertices: p.vertices }
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let first = vertices.first().ok_or_else(|| Error::InvalidInput("polytope needs at least one vertex".into()))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidInput("polytope dimension must be positive".into()));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("polytope vertex has a non-finite coordinate".into()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn point(p: Vec<f64>) -> Result<Self> {
        Self::new(vec![p])
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec<f64>> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Removes vertices lying within `tol` of an earlier vertex. Returns the
    /// cleaned polytope and the number of vertices dropped.
    pub fn normalize(&self, tol: f64) -> (Polytope, usize) {
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if !kept.iter().any(|k| dist(k, v) <= tol) {
                kept.push(v.clone());
            }
        }
        let dropped = self.vertices.len() - kept.len();
        (Polytope { vertices: kept }, dropped)
    }

    /// Exact-duplicate removal plus lexicographic sort: equal point sets give
    /// identical vertex lists.
    pub fn canonical(&self) -> Polytope {
        let mut v = self.vertices.clone();
        v.sort_by(|a, b| lex_cmp(a, b));
        v.dedup();
        Polytope { vertices: v }
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let k = self.vertices.len() as f64;
        c.iter_mut().for_each(|x| *x /= k);
        c
    }

    pub fn translate(&self, w: &[f64]) -> Polytope {
        Polytope { vertices: self.vertices.iter().map(|v| crate::vecops::add(v, w)).collect() }
    }

    /// Image under `x -> center + s (x - center)`.
    pub fn scale_about(&self, center: &[f64], s: f64) -> Polytope {
        Polytope { vertices: self.vertices.iter().map(|v| v.iter().zip(center).map(|(x, c)| c + s * (x - c)).collect()).collect() }
    }

    pub fn with_vertex(&self, v: Vec<f64>) -> Result<Polytope> {
        let mut vertices = self.vertices.clone();
        vertices.push(v);
        Polytope::new(vertices)
    }

    /// Smallest box `[lo, hi]` containing every vertex.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for k in 0..d {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        Ok(project_onto_polytope(p, self)?.dist <= tol)
    }
}

/// Result of a Euclidean projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    pub dist: f64,
    /// Frank-Wolfe gap certifying optimality of `point`.
    pub gap: f64,
}

/// Nearest point of `conv(poly)` to `p`.
pub fn project_onto_polytope(p: &[f64], poly: &Polytope) -> Result<Projection> {
    if p.len() != poly.dim() {
        return Err(Error::DimensionMismatch { expected: poly.dim(), found: p.len() });
    }
    let shifted: Vec<Vec<f64>> = poly.vertices.iter().map(|v| sub(v, p)).collect();
    let mn = min_norm_point(&shifted);
    let point: Vec<f64> = mn.point.iter().zip(p).map(|(x, y)| x + y).collect();
    Ok(Projection { dist: norm(&mn.point), point, gap: mn.gap })
}

/// `sup_{u in U} inf_{v in V} |u - v|`, attained at a vertex of `U`.
pub fn directed_hausdorff(u: &Polytope, v: &Polytope) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    let mut worst = 0.0f64;
    for x in u.vertices() {
        worst = worst.max(project_onto_polytope(x, v)?.dist);
    }
    Ok(worst)
}

pub fn hausdorff(u: &Polytope, v: &Polytope) -> Result<f64> {
    Ok(directed_hausdorff(u, v)?.max(directed_hausdorff(v, u)?))
}

/// Generators of `H = conv{(a_t, b_t)} + {(0, -mu) : mu >= 0}`. The ray runs
/// along the negative last coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct HSet {
    generators: Vec<Vec<f64>>,
}

impl HSet {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        // Same validity rules as a polytope in R^{n+1}.
        let p = Polytope::new(generators)?;
        if p.dim() < 2 {
            return Err(Error::InvalidInput("H-set generators need dimension n + 1 >= 2".into()));
        }
        Ok(Self { generators: p.into_vertices() })
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }

    /// Ray length past which the norm can only grow: the optimal ray
    /// parameter never exceeds the largest generator norm.
    pub fn ray_bound(&self) -> f64 {
        2.0 * (self.generators.iter().map(|g| norm(g)).fold(0.0, f64::max) + 1.0)
    }

    /// Polytope equal to `H` truncated at `ray_bound`.
    pub fn truncated(&self) -> Polytope {
        let mu = self.ray_bound();
        let last = self.dim() - 1;
        let mut vertices = self.generators.clone();
        for g in &self.generators {
            let mut s = g.clone();
            s[last] -= mu;
            vertices.push(s);
        }
        Polytope { vertices }
    }
}

/// `min |sum_i l_i g_i + (0, -mu)|` over the unit simplex and `mu >= 0`.
pub fn dist_origin_to_hset(h: &HSet) -> f64 {
    // For fixed weights the best mu is max(0, last coordinate), which is
    // bounded by the largest generator norm, so truncation loses nothing.
    min_norm_point(h.truncated().vertices()).norm()
}
