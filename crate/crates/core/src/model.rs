//! Problem data: finite LSIO problems with labelled rows, robust problems
//! with constraint-wise polytopal uncertainty, the vertex robust counterpart,
//! and the index-aware distances between systems.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hausdorff, Polytope};
use crate::lp::{self, LinearProgram, Row, SolveResult};
use crate::tolerance::Tolerances;
use crate::vecops::{dist, lex_cmp, stack};

/// Pairing tolerance used by [`pi_equivalent`].
pub const EQUIVALENCE_TOL: f64 = 1e-12;

/// One labelled row `<a, x> >= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub a: Vec<f64>,
    pub b: f64,
}

impl Constraint {
    pub fn new(label: impl Into<String>, a: Vec<f64>, b: f64) -> Self {
        Self { label: label.into(), a, b }
    }

    /// The stacked vector `(a, b)`.
    pub fn stacked(&self) -> Vec<f64> {
        stack(&self.a, self.b)
    }

    pub fn row(&self) -> Row {
        Row::new(self.a.clone(), self.b)
    }
}

/// `pi = (c, sigma)` with a finite, labelled index set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsioProblem {
    pub cost: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LsioProblem {
    pub fn new(cost: Vec<f64>, constraints: Vec<Constraint>) -> Result<Self> {
        let n = cost.len();
        if n == 0 {
            return Err(Error::InvalidInput("problem dimension must be positive".into()));
        }
        if cost.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("cost has a non-finite entry".into()));
        }
        let mut seen = HashSet::new();
        for c in &constraints {
            if c.a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.a.len() });
            }
            if !c.b.is_finite() || c.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("constraint '{}' has a non-finite entry", c.label)));
            }
            if !seen.insert(c.label.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate constraint label '{}'", c.label)));
            }
        }
        Ok(Self { cost, constraints })
    }

    /// Builds a problem with labels `0, 1, ...`.
    pub fn from_rows(cost: Vec<f64>, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let constraints = rows.iter().enumerate().map(|(i, (a, b))| Constraint::new(i.to_string(), a.clone(), *b)).collect();
        Self::new(cost, constraints)
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn rows(&self) -> Vec<Row> {
        self.constraints.iter().map(Constraint::row).collect()
    }

    pub fn to_lp(&self) -> LinearProgram {
        LinearProgram::new(self.cost.clone(), self.rows())
    }

    pub fn solve(&self, tol: &Tolerances) -> Result<SolveResult> {
        lp::solve(&self.to_lp(), tol)
    }

    /// The constraint set `{(a_t, b_t)}` sorted and with exact repeats removed.
    pub fn canonical_set(&self) -> Vec<Vec<f64>> {
        let mut v: Vec<Vec<f64>> = self.constraints.iter().map(Constraint::stacked).collect();
        v.sort_by(|a, b| lex_cmp(a, b));
        v.dedup();
        v
    }

    /// Π-equivalent copy indexed by the canonical set.
    pub fn canonical(&self) -> LsioProblem {
        let n = self.n();
        let constraints =
            self.canonical_set().into_iter().enumerate().map(|(i, v)| Constraint::new(i.to_string(), v[..n].to_vec(), v[n])).collect();
        LsioProblem { cost: self.cost.clone(), constraints }
    }

    pub fn with_constraint(&self, c: Constraint) -> Result<LsioProblem> {
        let mut constraints = self.constraints.clone();
        constraints.push(c);
        LsioProblem::new(self.cost.clone(), constraints)
    }
}

/// Cost of a robust problem: fixed, or ranging over a polytope.
#[derive(Clone, Debug, PartialEq)]
pub enum Cost {
    Fixed(Vec<f64>),
    Uncertain(Polytope),
}

/// A named uncertainty set `U_alpha` in `R^{n+1}`; vertices are `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainConstraint {
    pub name: String,
    pub set: Polytope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustProblem {
    n: usize,
    cost: Cost,
    constraints: Vec<UncertainConstraint>,
}

impl RobustProblem {
    pub fn new(n: usize, cost: Cost, constraints: Vec<UncertainConstraint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("problem dimension must be positive".into()));
        }
        match &cost {
            Cost::Fixed(c) => {
                if c.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: c.len() });
                }
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("cost has a non-finite entry".into()));
                }
            }
            Cost::Uncertain(p) => {
                if p.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
                }
            }
        }
        let mut seen = HashSet::new();
        for c in &constraints {
            if c.set.dim() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: c.set.dim() });
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate constraint name '{}'", c.name)));
            }
        }
        Ok(Self { n, cost, constraints })
    }

    pub fn fixed(cost: Vec<f64>, sets: Vec<(String, Polytope)>) -> Result<Self> {
        let n = cost.len();
        let constraints = sets.into_iter().map(|(name, set)| UncertainConstraint { name, set }).collect();
        Self::new(n, Cost::Fixed(cost), constraints)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost(&self) -> &Cost {
        &self.cost
    }

    pub fn fixed_cost(&self) -> Option<&[f64]> {
        match &self.cost {
            Cost::Fixed(c) => Some(c),
            Cost::Uncertain(_) => None,
        }
    }

    pub fn constraints(&self) -> &[UncertainConstraint] {
        &self.constraints
    }

    pub fn set(&self, name: &str) -> Option<&Polytope> {
        self.constraints.iter().find(|c| c.name == name).map(|c| &c.set)
    }

    /// Same cost, uncertainty sets replaced by `f(name, set)`.
    pub fn map_sets<F>(&self, mut f: F) -> Result<RobustProblem>
    where
        F: FnMut(&str, &Polytope) -> Result<Polytope>,
    {
        let constraints = self
            .constraints
            .iter()
            .map(|c| Ok(UncertainConstraint { name: c.name.clone(), set: f(&c.name, &c.set)? }))
            .collect::<Result<_>>()?;
        RobustProblem::new(self.n, self.cost.clone(), constraints)
    }
}

/// Label of the row generated by vertex `k` of `U_alpha`.
pub fn counterpart_label(alpha: &str, k: usize) -> String {
    format!("{alpha}#{k}")
}

/// One row per (constraint, vertex) pair; for polytopes the vertex rows
/// describe the robust feasible set exactly.
pub fn robust_counterpart(rp: &RobustProblem) -> Result<LsioProblem> {
    let cost = rp.fixed_cost().ok_or_else(|| Error::InvalidInput("uncertain cost: apply epigraph_reform first".into()))?.to_vec();
    let n = rp.n();
    let mut rows = Vec::new();
    for uc in rp.constraints() {
        if uc.set.vertices().is_empty() {
            return Err(Error::EmptyUncertaintySet(uc.name.clone()));
        }
        for (k, v) in uc.set.vertices().iter().enumerate() {
            rows.push(Constraint::new(counterpart_label(&uc.name, k), v[..n].to_vec(), v[n]));
        }
    }
    LsioProblem::new(cost, rows)
}

pub const EPIGRAPH_NAME: &str = "epigraph";

/// `min tau` over `(x, tau)` with `tau - <c, x> >= 0` for every vertex `c`
/// of the cost set. Original sets get a zero coefficient on `tau`.
pub fn epigraph_reform(rp: &RobustProblem) -> Result<RobustProblem> {
    let Cost::Uncertain(cset) = rp.cost() else {
        return Err(Error::InvalidInput("epigraph_reform needs an uncertain cost".into()));
    };
    let n = rp.n();
    let mut constraints = Vec::with_capacity(rp.constraints().len() + 1);
    for uc in rp.constraints() {
        let lifted = uc
            .set
            .vertices()
            .iter()
            .map(|v| {
                let mut w = v[..n].to_vec();
                w.push(0.0);
                w.push(v[n]);
                w
            })
            .collect();
        constraints.push(UncertainConstraint { name: uc.name.clone(), set: Polytope::new(lifted)? });
    }
    let mut name = EPIGRAPH_NAME.to_string();
    while rp.set(&name).is_some() {
        name.push('_');
    }
    let epi = cset
        .vertices()
        .iter()
        .map(|c| {
            let mut w: Vec<f64> = c.iter().map(|x| -x).collect();
            w.push(1.0);
            w.push(0.0);
            w
        })
        .collect();
    constraints.push(UncertainConstraint { name, set: Polytope::new(epi)? });
    let mut cost = vec![0.0; n + 1];
    cost[n] = 1.0;
    RobustProblem::new(n + 1, Cost::Fixed(cost), constraints)
}

/// `sup_t |(a1_t, b1_t) - (a2_t, b2_t)|` over a shared label set.
pub fn delta_sigma(s1: &[Constraint], s2: &[Constraint]) -> Result<f64> {
    let by_label: HashMap<&str, &Constraint> = s2.iter().map(|c| (c.label.as_str(), c)).collect();
    if s1.len() != s2.len() || by_label.len() != s2.len() {
        return Err(Error::IndexMismatch("systems have different index sets".into()));
    }
    let mut worst = 0.0f64;
    for c in s1 {
        let other = by_label
            .get(c.label.as_str())
            .ok_or_else(|| Error::IndexMismatch(format!("label '{}' missing from second system", c.label)))?;
        if other.a.len() != c.a.len() {
            return Err(Error::DimensionMismatch { expected: c.a.len(), found: other.a.len() });
        }
        worst = worst.max(dist(&c.stacked(), &other.stacked()));
    }
    Ok(worst)
}

pub fn delta_pi(p1: &LsioProblem, p2: &LsioProblem) -> Result<f64> {
    if p1.n() != p2.n() {
        return Err(Error::DimensionMismatch { expected: p1.n(), found: p2.n() });
    }
    Ok(dist(&p1.cost, &p2.cost).max(delta_sigma(&p1.constraints, &p2.constraints)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintwiseDistance {
    pub per_constraint: Vec<(String, f64)>,
    pub value: f64,
}

/// `d_nat(U, V) = max_alpha d_H(U_alpha, V_alpha)`.
pub fn constraintwise_distance(u: &RobustProblem, v: &RobustProblem) -> Result<ConstraintwiseDistance> {
    if u.constraints().len() != v.constraints().len() {
        return Err(Error::IndexMismatch("robust problems have different index sets".into()));
    }
    let mut per_constraint = Vec::with_capacity(u.constraints().len());
    let mut value = 0.0f64;
    for uc in u.constraints() {
        let vs = v.set(&uc.name).ok_or_else(|| Error::IndexMismatch(format!("constraint '{}' missing from second problem", uc.name)))?;
        let d = hausdorff(&uc.set, vs)?;
        value = value.max(d);
        per_constraint.push((uc.name.clone(), d));
    }
    Ok(ConstraintwiseDistance { per_constraint, value })
}

/// Equal costs and equal constraint sets, ignoring order and multiplicity.
pub fn pi_equivalent(p1: &LsioProblem, p2: &LsioProblem) -> bool {
    if p1.n() != p2.n() || dist(&p1.cost, &p2.cost) > EQUIVALENCE_TOL {
        return false;
    }
    let s1 = p1.canonical_set();
    let s2 = p2.canonical_set();
    let covered = |a: &[Vec<f64>], b: &[Vec<f64>]| a.iter().all(|x| b.iter().any(|y| dist(x, y) <= EQUIVALENCE_TOL));
    covered(&s1, &s2) && covered(&s2, &s1)
}
