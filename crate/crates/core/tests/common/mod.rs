//! Reference computations that share no code with the library.

#![allow(dead_code)]

use num::{BigInt, BigRational, Signed};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `d(0, conv{g_t} + cone{(0, -1)})` by nested simplex grids over the convex
/// weights. The ray coefficient is minimised in closed form.
pub fn grid_dist_origin_to_h(generators: &[Vec<f64>]) -> f64 {
    let m = generators.len();
    let dim = generators[0].len();
    let f = |w: &[f64]| {
        let mut p = vec![0.0; dim];
        for (g, wi) in generators.iter().zip(w) {
            for (pk, gk) in p.iter_mut().zip(g) {
                *pk += wi * gk;
            }
        }
        let last = p[dim - 1].min(0.0);
        (p[..dim - 1].iter().map(|x| x * x).sum::<f64>() + last * last).sqrt()
    };
    let n = 60usize;
    let mut best_w = vec![1.0 / m as f64; m];
    let mut best = f(&best_w);
    let mut counts = vec![0usize; m];
    compositions(n, m, &mut counts, 0, &mut |c| {
        let w: Vec<f64> = c.iter().map(|k| *k as f64 / n as f64).collect();
        let v = f(&w);
        if v < best {
            best = v;
            best_w = w;
        }
    });
    let mut h = 1.0 / n as f64;
    let k = 4i64;
    for _ in 0..20 {
        let pivot = (0..m).max_by(|a, b| best_w[*a].total_cmp(&best_w[*b])).unwrap();
        let free: Vec<usize> = (0..m).filter(|i| *i != pivot).collect();
        let mut offsets = vec![-k; free.len()];
        let (mut bw, mut bv) = (best_w.clone(), best);
        loop {
            let mut w = best_w.clone();
            let mut ok = true;
            let mut shift = 0.0;
            for (i, o) in free.iter().zip(&offsets) {
                w[*i] += h * *o as f64;
                shift += h * *o as f64;
                ok &= w[*i] >= 0.0;
            }
            w[pivot] -= shift;
            if ok && w[pivot] >= 0.0 {
                let v = f(&w);
                if v < bv {
                    bv = v;
                    bw = w;
                }
            }
            let mut i = 0;
            while i < offsets.len() && offsets[i] == k {
                offsets[i] = -k;
                i += 1;
            }
            if i == offsets.len() {
                break;
            }
            offsets[i] += 1;
        }
        best_w = bw;
        best = bv;
        h /= 3.0;
    }
    best
}

fn compositions(total: usize, parts: usize, cur: &mut Vec<usize>, i: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == parts - 1 {
        cur[i] = total;
        visit(cur);
        return;
    }
    for k in 0..=total {
        cur[i] = k;
        compositions(total - k, parts, cur, i + 1, visit);
    }
}

/// Support function `max_v <v, u>`.
pub fn support(vertices: &[Vec<f64>], u: &[f64]) -> f64 {
    vertices.iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
}

fn sweep_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..7200)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 7200.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let count = 20000;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => panic!("sweep oracle supports dimensions 2 and 3"),
    }
}

fn plane_normal(points: &[&Vec<f64>]) -> Option<Vec<f64>> {
    match points.len() {
        2 => {
            let d = [points[1][0] - points[0][0], points[1][1] - points[0][1]];
            let n = vec![-d[1], d[0]];
            let l = norm(&n);
            (l > 1e-12).then(|| n.iter().map(|x| x / l).collect())
        }
        3 => {
            let e1: Vec<f64> = (0..3).map(|k| points[1][k] - points[0][k]).collect();
            let e2: Vec<f64> = (0..3).map(|k| points[2][k] - points[0][k]).collect();
            let n = vec![e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]];
            let l = norm(&n);
            (l > 1e-12).then(|| n.iter().map(|x| x / l).collect())
        }
        _ => None,
    }
}

/// `min_{|u| = 1} h_P(u)` by a direction sweep; the best directions are then
/// snapped to the supporting planes through their most active vertices.
pub fn sweep_inradius(vertices: &[Vec<f64>]) -> f64 {
    let dim = vertices[0].len();
    let mut scored: Vec<(f64, Vec<f64>)> = sweep_directions(dim).into_iter().map(|u| (support(vertices, &u), u)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].0;
    for (_, u) in scored.iter().take(40) {
        let mut order: Vec<&Vec<f64>> = vertices.iter().collect();
        order.sort_by(|a, b| dot(b, u).total_cmp(&dot(a, u)));
        let top: Vec<&Vec<f64>> = order.into_iter().take(dim + 2).collect();
        for subset in subsets(top.len(), dim) {
            let pts: Vec<&Vec<f64>> = subset.iter().map(|i| top[*i]).collect();
            let Some(mut n) = plane_normal(&pts) else { continue };
            if dot(pts[0], &n) < 0.0 {
                n.iter_mut().for_each(|x| *x = -*x);
            }
            let h = dot(pts[0], &n);
            if support(vertices, &n) <= h + 1e-12 && h < best {
                best = h;
            }
        }
    }
    best
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact feasibility of `<a_t, x> >= b_t` by Fourier-Motzkin elimination.
pub fn fm_feasible(mut rows: Vec<(Vec<Q>, Q)>) -> bool {
    let n = rows.first().map(|r| r.0.len()).unwrap_or(0);
    for k in (0..n).rev() {
        let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
        for (a, b) in rows {
            if a[k].is_positive() {
                pos.push((a, b));
            } else if a[k].is_negative() {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let sp = an[k].abs();
                let sn = ap[k].clone();
                let a: Vec<Q> = ap.iter().zip(an).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = bp * &sp + bn * &sn;
                rest.push((a, b));
            }
        }
        rest.sort();
        rest.dedup();
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Status of `min <c, x>` s.t. `<a_t, x> >= b_t` in exact arithmetic.
pub fn exact_status(c: &[i64], rows: &[(Vec<i64>, i64)]) -> ExactStatus {
    let qrows: Vec<(Vec<Q>, Q)> = rows.iter().map(|(a, b)| (a.iter().map(|x| q(*x)).collect(), q(*b))).collect();
    if !fm_feasible(qrows) {
        return ExactStatus::Infeasible;
    }
    let mut cone: Vec<(Vec<Q>, Q)> = rows.iter().map(|(a, _)| (a.iter().map(|x| q(*x)).collect(), q(0))).collect();
    cone.push((c.iter().map(|x| q(-x)).collect(), q(1)));
    if fm_feasible(cone) {
        ExactStatus::Unbounded
    } else {
        ExactStatus::Optimal
    }
}

/// Straight transcription of the Lipschitz constant from its five inputs.
pub fn lipschitz_formula(sup_r: f64, d_z: f64, dist_infeas: f64, eps: f64, c_norm: f64) -> [f64; 5] {
    let psi = |a: f64| (1.0 + a) * (1.0 + a * a).sqrt();
    let rho_hat = sup_r / d_z;
    let beta = psi(rho_hat) / (dist_infeas - eps);
    let gamma = rho_hat + eps * beta + c_norm * beta;
    let mu = (sup_r + eps * f64::max(1.0, gamma)) / (d_z - eps);
    let l = (eps + c_norm) * psi(mu) / (dist_infeas - eps) + mu;
    [rho_hat, beta, gamma, mu, l]
}
