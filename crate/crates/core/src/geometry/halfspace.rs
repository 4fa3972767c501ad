//! H-represented polytopes `{x : <a_i, x> <= b_i}` with brute-force vertex
//! enumeration. Only meant for the small dimensions used by the certificates.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::{project_onto_polytope, Polytope, Projection};
use crate::error::{Error, Result};
use crate::vecops::{dist, dot, lex_cmp, norm};

pub const MAX_ENUM_DIM: usize = 4;
const MAX_SUBSETS: u128 = 20_000_000;
const DET_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    dim: usize,
    /// Rows `(a, b)` meaning `<a, x> <= b`, with `|a| = 1` after construction.
    rows: Vec<(Vec<f64>, f64)>,
}

impl HPolytope {
    /// Rows with a zero normal are kept out of the representation; they are
    /// either vacuous or make the set empty, which is recorded.
    pub fn new(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("polyhedron dimension must be positive".into()));
        }
        let mut kept = Vec::with_capacity(rows.len());
        let mut empty = false;
        for (a, b) in rows {
            if a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.len() });
            }
            if !b.is_finite() || a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite half-space data".into()));
            }
            let s = norm(&a);
            if s == 0.0 {
                empty |= b < 0.0;
                continue;
            }
            kept.push((a.iter().map(|v| v / s).collect(), b / s));
        }
        if empty {
            // 0 <= b with b < 0: encode as two opposite unit rows.
            let mut e = vec![0.0; dim];
            e[0] = 1.0;
            kept.push((e.clone(), -1.0));
            e[0] = -1.0;
            kept.push((e, -1.0));
        }
        Ok(Self { dim, rows: kept })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|(a, b)| dot(a, x) <= b + tol)
    }

    /// Intersection with the box `|x_i - center_i| <= half_width`.
    pub fn clipped(&self, center: &[f64], half_width: f64) -> HPolytope {
        let mut rows = self.rows.clone();
        for i in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[i] = 1.0;
            rows.push((e.clone(), center[i] + half_width));
            e[i] = -1.0;
            rows.push((e, half_width - center[i]));
        }
        HPolytope { dim: self.dim, rows }
    }

    /// Vertices of a bounded polyhedron, deduplicated and lexicographically
    /// sorted. Returns an empty list for an empty set.
    pub fn vertices(&self, tol: f64) -> Result<Vec<Vec<f64>>> {
        let d = self.dim;
        if d > MAX_ENUM_DIM {
            return Err(Error::DimensionTooHigh { dim: d, max: MAX_ENUM_DIM });
        }
        if binomial(self.rows.len(), d) > MAX_SUBSETS {
            return Err(Error::InvalidInput(format!("vertex enumeration over {} rows in dimension {d} is too large", self.rows.len())));
        }
        let mut out: Vec<Vec<f64>> = Vec::new();
        for subset in (0..self.rows.len()).combinations(d) {
            let m = DMatrix::from_fn(d, d, |r, c| self.rows[subset[r]].0[c]);
            let lu = m.lu();
            if lu.determinant().abs() < DET_EPS {
                continue;
            }
            let rhs = DVector::from_iterator(d, subset.iter().map(|&i| self.rows[i].1));
            let Some(x) = lu.solve(&rhs) else { continue };
            let x: Vec<f64> = x.iter().copied().collect();
            let scale = 1.0 + norm(&x);
            if self.contains(&x, tol * scale) {
                out.push(x);
            }
        }
        out.sort_by(|a, b| lex_cmp(a, b));
        let mut uniq: Vec<Vec<f64>> = Vec::with_capacity(out.len());
        for v in out {
            if !uniq.iter().any(|u| dist(u, &v) <= tol * (1.0 + norm(&v))) {
                uniq.push(v);
            }
        }
        Ok(uniq)
    }

    pub fn to_polytope(&self, tol: f64) -> Result<Polytope> {
        let v = self.vertices(tol)?;
        if v.is_empty() {
            return Err(Error::InvalidInput("polyhedron is empty".into()));
        }
        Polytope::new(v)
    }

    /// Projection of `p`; the set must be bounded.
    pub fn project(&self, p: &[f64], tol: f64) -> Result<Projection> {
        project_onto_polytope(p, &self.to_polytope(tol)?)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> HPolytope {
        HPolytope::new(
            2,
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, 1.0], 1.0),
                (vec![0.0, -1.0], 0.0),
                // redundant
                (vec![1.0, 1.0], 2.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn square_vertices() {
        let v = unit_square().vertices(1e-9).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().any(|x| dist(x, &[1.0, 1.0]) < 1e-12));
    }

    #[test]
    fn empty_and_vacuous_rows() {
        let h = HPolytope::new(1, vec![(vec![0.0], 1.0), (vec![1.0], 1.0), (vec![-1.0], 1.0)]).unwrap();
        assert_eq!(h.vertices(1e-9).unwrap().len(), 2);
        let h = HPolytope::new(1, vec![(vec![0.0], -1.0), (vec![1.0], 1.0), (vec![-1.0], 1.0)]).unwrap();
        assert!(h.vertices(1e-9).unwrap().is_empty());
        let h = HPolytope::new(1, vec![(vec![1.0], 0.0), (vec![-1.0], -1.0)]).unwrap();
        assert!(h.to_polytope(1e-9).is_err());
    }

    #[test]
    fn clipping_bounds_a_halfplane() {
        let h = HPolytope::new(2, vec![(vec![0.0, -1.0], 0.0)]).unwrap().clipped(&[0.0, 0.0], 1.0);
        let v = h.vertices(1e-9).unwrap();
        assert_eq!(v.len(), 4);
        let p = h.project(&[0.0, -3.0], 1e-9).unwrap();
        assert!((p.dist - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_high_dimension() {
        let h = HPolytope::new(5, vec![(vec![1.0; 5], 1.0)]).unwrap();
        assert!(matches!(h.vertices(1e-9), Err(Error::DimensionTooHigh { .. })));
    }
}
