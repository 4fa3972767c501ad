//! Dense two-phase simplex for problems of the form
//!
//! ```text
//! minimize  <c, x>   subject to  <a_t, x> >= b_t,   x free
//! ```
//!
//! Pivoting follows Bland's rule, so identical inputs always produce identical
//! outputs. Every `Optimal` result carries dual weights, every `Infeasible`
//! result a Farkas certificate and every `Unbounded` result a recession ray.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::vecops::{dot, max_abs};

const PIVOT_EPS: f64 = 1e-11;
const MAX_ITERATIONS: usize = 200_000;

/// A single inequality `<a, x> >= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Row {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) - self.b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>, rows: Vec<Row>) -> Self {
        Self { cost, rows }
    }

    pub fn dim(&self) -> usize {
        self.cost.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::InvalidInput("linear program has dimension 0".into()));
        }
        if self.cost.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite cost entry".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.a.len() });
            }
            if !row.b.is_finite() || row.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Optimal value; `+inf` when infeasible, `-inf` when unbounded.
    pub value: f64,
    pub solution: Option<Vec<f64>>,
    /// Non-negative row weights `y` with `sum y_t a_t = c` (optimal case).
    pub dual: Option<Vec<f64>>,
    /// Non-negative row weights `y`, `sum y = 1`, with `sum y_t a_t = 0` and
    /// `sum y_t b_t > 0` (infeasible case).
    pub farkas: Option<Vec<f64>>,
    /// Direction `d` with `<a_t, d> >= 0` for all rows and `<c, d> < 0`.
    pub ray: Option<Vec<f64>>,
    pub iterations: usize,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    /// Objective row is stored at index `rows`.
    #[inline]
    fn reduced_cost(&self, j: usize) -> f64 {
        self.at(self.rows, j)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    let v = self.data[r * w + j];
                    if v != 0.0 {
                        self.data[i * w + j] -= f * v;
                    }
                }
                self.data[i * w + c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over the columns in `allowed`. Returns `None` on
    /// optimality or `Some(col)` with an unbounded entering column.
    fn run(&mut self, allowed: &[bool], cost_eps: f64, iterations: &mut usize) -> Result<Option<usize>> {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && self.reduced_cost(j) < -cost_eps);
            let Some(j) = entering else {
                return Ok(None);
            };
            *iterations += 1;
            if *iterations > MAX_ITERATIONS {
                return Err(Error::IterationLimit(MAX_ITERATIONS));
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let coef = self.at(i, j);
                if coef > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / coef;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if (!tie && ratio < br) || (tie && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Some(j)),
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }
}

/// Standard-form data: `A z = b`, `z >= 0`, with `b >= 0`.
struct StandardForm {
    n: usize,
    m: usize,
    /// Column-major copy of the constraint matrix including artificials.
    columns: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    sign: Vec<f64>,
    n_struct: usize,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> (Self, Vec<usize>) {
        let n = lp.dim();
        let m = lp.rows.len();
        let n_struct = 2 * n + m;
        let sign: Vec<f64> = lp.rows.iter().map(|r| if r.b > 0.0 { 1.0 } else { -1.0 }).collect();
        let mut columns = vec![vec![0.0; m]; n_struct];
        for (t, row) in lp.rows.iter().enumerate() {
            for k in 0..n {
                columns[k][t] = sign[t] * row.a[k];
                columns[n + k][t] = -sign[t] * row.a[k];
            }
            columns[2 * n + t][t] = -sign[t];
        }
        let rhs: Vec<f64> = lp.rows.iter().zip(&sign).map(|(r, s)| s * r.b).collect();
        let mut basis = Vec::with_capacity(m);
        for t in 0..m {
            if sign[t] < 0.0 {
                basis.push(2 * n + t);
            } else {
                let mut col = vec![0.0; m];
                col[t] = 1.0;
                basis.push(columns.len());
                columns.push(col);
            }
        }
        (Self { n, m, columns, rhs, sign, n_struct }, basis)
    }

    fn total_cols(&self) -> usize {
        self.columns.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct
    }

    fn tableau(&self, basis: Vec<usize>) -> Tableau {
        let cols = self.total_cols();
        let w = cols + 1;
        let mut data = vec![0.0; (self.m + 1) * w];
        for (j, col) in self.columns.iter().enumerate() {
            for i in 0..self.m {
                data[i * w + j] = col[i];
            }
        }
        for i in 0..self.m {
            data[i * w + cols] = self.rhs[i];
        }
        Tableau { rows: self.m, cols, data, basis }
    }

    /// Solves `B^T y = c_B` over the active rows using the original columns.
    fn duals(&self, active_rows: &[usize], basis: &[usize], costs: &[f64]) -> Option<Vec<f64>> {
        let k = active_rows.len();
        if k == 0 {
            return Some(vec![0.0; self.m]);
        }
        let bt = DMatrix::from_fn(k, k, |r, c| self.columns[basis[r]][active_rows[c]]);
        let cb = DVector::from_iterator(k, basis.iter().map(|&j| costs[j]));
        let y = bt.lu().solve(&cb)?;
        let mut full = vec![0.0; self.m];
        for (c, &row) in active_rows.iter().enumerate() {
            full[row] = y[c];
        }
        Some(full)
    }

    /// Solves `B z_B = b` over the active rows.
    fn primal(&self, active_rows: &[usize], basis: &[usize]) -> Option<Vec<f64>> {
        let k = active_rows.len();
        let mut z = vec![0.0; self.total_cols()];
        if k == 0 {
            return Some(z);
        }
        let b = DMatrix::from_fn(k, k, |r, c| self.columns[basis[c]][active_rows[r]]);
        let rhs = DVector::from_iterator(k, active_rows.iter().map(|&r| self.rhs[r]));
        let zb = b.lu().solve(&rhs)?;
        for (c, &j) in basis.iter().enumerate() {
            z[j] = zb[c];
        }
        Some(z)
    }

    fn x_from(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n).map(|k| z[k] - z[self.n + k]).collect()
    }
}

/// Solves the linear program.
pub fn solve(lp: &LinearProgram, tol: &Tolerances) -> Result<SolveResult> {
    lp.validate()?;
    let n = lp.dim();
    let m = lp.rows.len();
    let cost_scale = 1.0 + max_abs(&lp.cost);
    let cost_eps = tol.optimality * 0.1 * cost_scale;

    if m == 0 {
        // No constraints: optimal at 0 iff c = 0.
        if max_abs(&lp.cost) <= tol.optimality {
            return Ok(SolveResult {
                status: Status::Optimal,
                value: 0.0,
                solution: Some(vec![0.0; n]),
                dual: Some(vec![]),
                farkas: None,
                ray: None,
                iterations: 0,
            });
        }
        let ray: Vec<f64> = lp.cost.iter().map(|c| -c).collect();
        return Ok(SolveResult {
            status: Status::Unbounded,
            value: f64::NEG_INFINITY,
            solution: None,
            dual: None,
            farkas: None,
            ray: Some(ray),
            iterations: 0,
        });
    }

    let (sf, basis) = StandardForm::build(lp);
    let total = sf.total_cols();
    let mut tab = sf.tableau(basis);
    let mut iterations = 0usize;

    // Phase 1: minimise the sum of artificials.
    let phase1_cost: Vec<f64> = (0..total).map(|j| if sf.is_artificial(j) { 1.0 } else { 0.0 }).collect();
    set_objective(&mut tab, &phase1_cost);
    let all: Vec<bool> = vec![true; total];
    tab.run(&all, 1e-12, &mut iterations)?;
    let infeasibility = -tab.rhs(m);
    let rhs_scale = 1.0 + max_abs(&sf.rhs);
    if infeasibility > tol.feasibility * rhs_scale {
        // The reduced cost of the slack of row t is sign_t y_t.
        let mut farkas: Vec<f64> = (0..m).map(|t| tab.reduced_cost(2 * n + t).max(0.0)).collect();
        let total_weight: f64 = farkas.iter().sum();
        if total_weight <= 0.0 {
            return Err(Error::NumericalBreakdown("empty Farkas certificate".into()));
        }
        farkas.iter_mut().for_each(|v| *v /= total_weight);
        return Ok(SolveResult {
            status: Status::Infeasible,
            value: f64::INFINITY,
            solution: None,
            dual: None,
            farkas: Some(farkas),
            ray: None,
            iterations,
        });
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // linearly dependent and get dropped.
    let mut active_rows = Vec::with_capacity(m);
    for i in 0..m {
        if sf.is_artificial(tab.basis[i]) {
            let col =
                (0..sf.n_struct).filter(|&j| tab.at(i, j).abs() > 1e-9).max_by(|&a, &b| tab.at(i, a).abs().total_cmp(&tab.at(i, b).abs()));
            if let Some(j) = col {
                tab.pivot(i, j);
                active_rows.push(i);
            }
        } else {
            active_rows.push(i);
        }
    }
    let dropped: Vec<usize> = (0..m).filter(|i| !active_rows.contains(i)).collect();
    if !dropped.is_empty() {
        let w = tab.cols + 1;
        for &i in &dropped {
            for j in 0..w {
                tab.data[i * w + j] = 0.0;
            }
            // Keep the slot inert: an artificial basic at level zero never re-enters.
        }
    }

    let mut phase2_cost = vec![0.0; total];
    for k in 0..n {
        phase2_cost[k] = lp.cost[k];
        phase2_cost[n + k] = -lp.cost[k];
    }
    set_objective(&mut tab, &phase2_cost);
    let allowed: Vec<bool> = (0..total).map(|j| !sf.is_artificial(j)).collect();
    let unbounded = tab.run(&allowed, cost_eps, &mut iterations)?;

    let basis_active: Vec<usize> = active_rows.iter().map(|&i| tab.basis[i]).collect();

    if let Some(j) = unbounded {
        let mut dz = vec![0.0; total];
        dz[j] = 1.0;
        for &i in &active_rows {
            dz[tab.basis[i]] = -tab.at(i, j);
        }
        let mut ray = sf.x_from(&dz);
        let norm = crate::vecops::norm(&ray);
        if norm > 0.0 {
            ray.iter_mut().for_each(|v| *v /= norm);
        }
        return Ok(SolveResult {
            status: Status::Unbounded,
            value: f64::NEG_INFINITY,
            solution: None,
            dual: None,
            farkas: None,
            ray: Some(ray),
            iterations,
        });
    }

    let z = sf.primal(&active_rows, &basis_active).ok_or_else(|| Error::NumericalBreakdown("singular optimal basis".into()))?;
    let x = sf.x_from(&z);
    let y =
        sf.duals(&active_rows, &basis_active, &phase2_cost).ok_or_else(|| Error::NumericalBreakdown("singular optimal basis".into()))?;
    let dual: Vec<f64> = y.iter().zip(&sf.sign).map(|(v, s)| (v * s).max(0.0)).collect();

    let worst = lp.rows.iter().map(|r| -r.slack(&x) / (1.0 + r.b.abs() + max_abs(&r.a) * crate::vecops::norm(&x))).fold(0.0f64, f64::max);
    if worst > 1e3 * tol.feasibility {
        return Err(Error::NumericalBreakdown(format!("optimal point violates a row by {worst:e}")));
    }

    Ok(SolveResult {
        status: Status::Optimal,
        value: dot(&lp.cost, &x),
        solution: Some(x),
        dual: Some(dual),
        farkas: None,
        ray: None,
        iterations,
    })
}

fn set_objective(tab: &mut Tableau, cost: &[f64]) {
    let w = tab.cols + 1;
    let obj = tab.rows * w;
    tab.data[obj..obj + tab.cols].copy_from_slice(&cost[..tab.cols]);
    tab.data[obj + tab.cols] = 0.0;
    for i in 0..tab.rows {
        let cb = cost[tab.basis[i]];
        if cb != 0.0 && tab.at(i, tab.basis[i]) != 0.0 {
            for j in 0..w {
                let v = tab.data[i * w + j];
                tab.data[obj + j] -= cb * v;
            }
        }
    }
}

/// A certified strong Slater point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterCertificate {
    pub point: Vec<f64>,
    pub rho: f64,
    /// True when the box bound on `rho` was active ("unbounded slack").
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Slater {
    Certified(SlaterCertificate),
    NoSlater { rho: f64 },
}

impl Slater {
    pub fn certificate(&self) -> Option<&SlaterCertificate> {
        match self {
            Slater::Certified(c) => Some(c),
            Slater::NoSlater { .. } => None,
        }
    }

    pub fn rho(&self) -> f64 {
        match self {
            Slater::Certified(c) => c.rho,
            Slater::NoSlater { rho } => *rho,
        }
    }
}

/// Maximises the uniform slack `rho` over `(x, rho)` subject to
/// `<a_t, x> - rho >= b_t` and `rho <= tol.slater_cap`.
pub fn slater_constant(n: usize, rows: &[Row], tol: &Tolerances) -> Result<Slater> {
    let mut lifted: Vec<Row> = rows
        .iter()
        .map(|r| {
            if r.a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.a.len() });
            }
            let mut a = r.a.clone();
            a.push(-1.0);
            Ok(Row::new(a, r.b))
        })
        .collect::<Result<_>>()?;
    let mut cap = vec![0.0; n + 1];
    cap[n] = -1.0;
    lifted.push(Row::new(cap, -tol.slater_cap));
    let mut cost = vec![0.0; n + 1];
    cost[n] = -1.0;
    let res = solve(&LinearProgram::new(cost, lifted), tol)?;
    let sol = match (res.status, res.solution) {
        (Status::Optimal, Some(s)) => s,
        _ => return Err(Error::NumericalBreakdown("Slater LP did not reach an optimum".into())),
    };
    let rho = sol[n];
    if rho <= tol.feasibility {
        return Ok(Slater::NoSlater { rho });
    }
    let point = sol[..n].to_vec();
    // Report the slack actually attained at the returned point.
    let attained = rows.iter().map(|r| r.slack(&point)).fold(f64::INFINITY, f64::min);
    let rho = if rows.is_empty() { rho } else { attained.min(tol.slater_cap) };
    if rho <= tol.feasibility {
        return Ok(Slater::NoSlater { rho });
    }
    Ok(Slater::Certified(SlaterCertificate { capped: rho >= tol.slater_cap * (1.0 - 1e-12), point, rho }))
}

/// Tests boundedness of the optimal face through its recession cone
/// `{d : <a_t, d> >= 0, <c, d> = 0}` intersected with the unit box.
pub fn optimal_face_bounded(lp: &LinearProgram, tol: &Tolerances) -> Result<bool> {
    let base = solve(lp, tol)?;
    if base.status != Status::Optimal {
        return Err(Error::NotSolvable);
    }
    let n = lp.dim();
    let mut rows: Vec<Row> = lp.rows.iter().map(|r| Row::new(r.a.clone(), 0.0)).collect();
    rows.push(Row::new(lp.cost.clone(), 0.0));
    rows.push(Row::new(lp.cost.iter().map(|v| -v).collect(), 0.0));
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push(Row::new(e.clone(), -1.0));
        e[i] = -1.0;
        rows.push(Row::new(e, -1.0));
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut cost = vec![0.0; n];
            cost[i] = -s;
            let res = solve(&LinearProgram::new(cost, rows.clone()), tol)?;
            if res.status != Status::Optimal {
                return Err(Error::NumericalBreakdown("recession LP not optimal".into()));
            }
            if -res.value > 1e3 * tol.feasibility {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
