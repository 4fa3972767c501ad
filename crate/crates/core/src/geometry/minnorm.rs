//! Minimum-norm point of the convex hull of a finite point set.
//!
//! Wolfe's active-set method does the bulk of the work; a pairwise
//! Frank-Wolfe pass takes over if round-off stalls it. The Frank-Wolfe
//! duality gap `|x|^2 - min_i <x, p_i>` is returned as the optimality
//! certificate.

use nalgebra::{DMatrix, DVector};

use crate::vecops::{dot, norm_sq};

const MAX_ITERATIONS: usize = 100_000;
/// Target gap relative to the squared scale of the input.
const TARGET_GAP: f64 = 1e-14;
const WEIGHT_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct MinNormPoint {
    pub point: Vec<f64>,
    /// Convex weights, one per input point.
    pub weights: Vec<f64>,
    /// Frank-Wolfe duality gap at `point`.
    pub gap: f64,
    pub iterations: usize,
}

impl MinNormPoint {
    pub fn norm(&self) -> f64 {
        norm_sq(&self.point).sqrt()
    }
}

/// Panics if `points` is empty; callers validate.
pub fn min_norm_point(points: &[Vec<f64>]) -> MinNormPoint {
    assert!(!points.is_empty(), "min_norm_point on an empty set");
    let dim = points[0].len();
    let scale = points.iter().map(|p| norm_sq(p)).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let target = TARGET_GAP * scale;

    let start = (0..points.len()).min_by(|&i, &j| norm_sq(&points[i]).total_cmp(&norm_sq(&points[j]))).unwrap();
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].clone();
    let mut iterations = 0;

    'major: while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (j, pj) = fw_vertex(points, &x);
        let gap = norm_sq(&x) - pj;
        if gap <= target || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);
        loop {
            iterations += 1;
            let Some(alpha) = affine_minimizer(points, &active) else {
                // Affinely dependent active set: undo the insertion.
                active.pop();
                lambda.pop();
                break 'major;
            };
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= WEIGHT_EPS && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut k = 0;
            let mut removed = false;
            while k < active.len() {
                if lambda[k] <= WEIGHT_EPS && active.len() > 1 {
                    active.remove(k);
                    lambda.remove(k);
                    removed = true;
                } else {
                    k += 1;
                }
            }
            if !removed {
                // Guard against a minor cycle that makes no progress.
                let (kmin, _) = lambda.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
                active.remove(kmin);
                lambda.remove(kmin);
            }
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
            if active.len() == 1 {
                lambda[0] = 1.0;
                break;
            }
        }
        x = combine(points, &active, &lambda, dim);
    }

    let mut weights = vec![0.0; points.len()];
    for (&i, &l) in active.iter().zip(&lambda) {
        weights[i] += l;
    }
    let (_, pj) = fw_vertex(points, &x);
    let mut gap = norm_sq(&x) - pj;
    if gap > target {
        let (xr, g, it) = pairwise_refine(points, weights.clone(), target, MAX_ITERATIONS - iterations.min(MAX_ITERATIONS));
        if g < gap {
            x = xr.0;
            weights = xr.1;
            gap = g;
        }
        iterations += it;
    }
    MinNormPoint { point: x, weights, gap: gap.max(0.0), iterations }
}

fn fw_vertex(points: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let v = dot(x, p);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

fn combine(points: &[Vec<f64>], active: &[usize], lambda: &[f64], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (&i, &l) in active.iter().zip(lambda) {
        for (xk, pk) in x.iter_mut().zip(&points[i]) {
            *xk += l * pk;
        }
    }
    x
}

/// Weights (summing to one) of the minimum-norm point of the affine hull.
fn affine_minimizer(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    let dim = points[active[0]].len();
    if k - 1 > dim {
        return None;
    }
    let p0 = &points[active[0]];
    let d = DMatrix::from_fn(dim, k - 1, |r, c| points[active[c + 1]][r] - p0[r]);
    let g = d.transpose() * &d;
    let rhs = -(d.transpose() * DVector::from_column_slice(p0));
    let scale = g.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let chol = g.clone().cholesky()?;
    // Reject nearly dependent sets via the Cholesky pivots.
    let l = chol.l();
    let min_pivot = l.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    if !(min_pivot > 1e-13 * scale) {
        return None;
    }
    let beta = chol.solve(&rhs);
    if beta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.sum());
    alpha.extend(beta.iter().copied());
    Some(alpha)
}

type Refined = ((Vec<f64>, Vec<f64>), f64, usize);

fn pairwise_refine(points: &[Vec<f64>], mut w: Vec<f64>, target: f64, max_iter: usize) -> Refined {
    let dim = points[0].len();
    let all: Vec<usize> = (0..points.len()).collect();
    let mut x = combine(points, &all, &w, dim);
    let mut gap = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let (s, ps) = fw_vertex(points, &x);
        gap = norm_sq(&x) - ps;
        if gap <= target {
            break;
        }
        let mut away = None;
        let mut best = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if w[i] > 0.0 {
                let v = dot(&x, p);
                if v > best {
                    best = v;
                    away = Some(i);
                }
            }
        }
        let a = away.unwrap();
        if a == s {
            break;
        }
        let d: Vec<f64> = points[s].iter().zip(&points[a]).map(|(u, v)| u - v).collect();
        let dd = norm_sq(&d);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&x, &d) / dd).clamp(0.0, w[a]);
        if step == 0.0 {
            break;
        }
        w[s] += step;
        w[a] -= step;
        for (xk, dk) in x.iter_mut().zip(&d) {
            *xk += step * dk;
        }
    }
    let (_, ps) = fw_vertex(points, &x);
    gap = gap.min(norm_sq(&x) - ps);
    ((x, w), gap, it)
}
