//! Small linear programs built on `minilp`.
//!
//! Problems are kept as plain data so the same feasible region can be
//! re-solved under several objectives (lexicographic tie-breaking needs this).

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::geometry::{Norm, SetShape, TargetSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    Le,
    Ge,
    Eq,
}

/// `Σ coeff·var + constant`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine {
            terms: Vec::new(),
            constant: c,
        }
    }

    fn shifted(&self, by: f64) -> Affine {
        Affine {
            terms: self.terms.clone(),
            constant: self.constant + by,
        }
    }

    fn negated(&self) -> Affine {
        Affine {
            terms: self.terms.iter().map(|&(v, c)| (v, -c)).collect(),
            constant: -self.constant,
        }
    }

    fn plus_var(&self, var: usize, coeff: f64) -> Affine {
        let mut out = self.clone();
        out.terms.push((var, coeff));
        out
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Lp {
    bounds: Vec<(f64, f64)>,
    objective: Vec<f64>,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl Lp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, lo: f64, hi: f64) -> usize {
        self.bounds.push((lo, hi));
        self.objective.push(0.0);
        self.bounds.len() - 1
    }

    pub fn nonneg(&mut self) -> usize {
        self.var(0.0, f64::INFINITY)
    }

    pub fn free(&mut self) -> usize {
        self.var(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Adds `count` variables constrained to the probability simplex.
    pub fn simplex(&mut self, count: usize) -> Vec<usize> {
        let vars: Vec<usize> = (0..count).map(|_| self.var(0.0, 1.0)).collect();
        self.constrain(vars.iter().map(|&v| (v, 1.0)).collect(), Cmp::Eq, 1.0);
        vars
    }

    pub fn set_objective(&mut self, terms: &[(usize, f64)]) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(v, c) in terms {
            self.objective[v] += c;
        }
    }

    pub fn constrain(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((terms, cmp, rhs));
    }

    /// `expr cmp rhs` with the affine constant moved to the right-hand side.
    pub fn constrain_affine(&mut self, expr: &Affine, cmp: Cmp, rhs: f64) {
        self.constrain(expr.terms.clone(), cmp, rhs - expr.constant);
    }

    pub fn solve(&self, maximize: bool) -> Result<LpSolution> {
        let direction = if maximize {
            OptimizationDirection::Maximize
        } else {
            OptimizationDirection::Minimize
        };
        let mut problem = Problem::new(direction);
        let vars: Vec<_> = self
            .bounds
            .iter()
            .zip(&self.objective)
            .map(|(&bounds, &c)| problem.add_var(c, bounds))
            .collect();
        for (terms, cmp, rhs) in &self.rows {
            let expr: Vec<_> = terms.iter().map(|&(v, c)| (vars[v], c)).collect();
            let op = match cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(expr.as_slice(), op, *rhs);
        }
        let solution = problem.solve().map_err(|e| match e {
            minilp::Error::Infeasible => Error::Infeasible("linear program has no feasible point".into()),
            other => Error::Lp(other.to_string()),
        })?;
        Ok(LpSolution {
            values: vars.iter().map(|&v| solution[v]).collect(),
            objective: solution.objective(),
        })
    }
}

/// True when `d_p(·, set)` is a max of finitely many affine functions and can
/// therefore be written as a linear program.
pub(crate) fn distance_is_polyhedral(set: &TargetSet) -> bool {
    matches!(set.shape(), SetShape::Whole { .. }) || set.dim() == 1 || set.norm() != Norm::L2
}

/// Adds auxiliary variables so that minimizing the returned terms gives
/// `d_p(r, set)`.
pub(crate) fn add_distance(lp: &mut Lp, r: &[Affine], set: &TargetSet) -> Result<Vec<(usize, f64)>> {
    if r.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            what: "target set",
            expected: set.dim(),
            found: r.len(),
        });
    }
    if !distance_is_polyhedral(set) {
        return Err(Error::Unsupported(
            "Euclidean distance in dimension ≥ 2 is not a linear program".into(),
        ));
    }
    let norm = if set.dim() == 1 { Norm::L1 } else { set.norm() };
    // Residual whose norm is the distance, per shape.
    let residual: Vec<Affine> = match set.shape() {
        SetShape::Whole { .. } => return Ok(Vec::new()),
        SetShape::NegativeOrthant { .. } => {
            let mut obj = Vec::new();
            match norm {
                Norm::LInf => {
                    let t = lp.nonneg();
                    for ri in r {
                        lp.constrain_affine(&ri.plus_var(t, -1.0), Cmp::Le, 0.0);
                    }
                    obj.push((t, 1.0));
                }
                _ => {
                    for ri in r {
                        let s = lp.nonneg();
                        lp.constrain_affine(&ri.plus_var(s, -1.0), Cmp::Le, 0.0);
                        obj.push((s, 1.0));
                    }
                }
            }
            return Ok(obj);
        }
        SetShape::HalfLineBelow(theta) => {
            let s = lp.nonneg();
            lp.constrain_affine(&r[0].shifted(-theta).plus_var(s, -1.0), Cmp::Le, 0.0);
            return Ok(vec![(s, 1.0)]);
        }
        SetShape::HalfLineAbove(theta) => {
            let s = lp.nonneg();
            lp.constrain_affine(&r[0].shifted(-theta).negated().plus_var(s, -1.0), Cmp::Le, 0.0);
            return Ok(vec![(s, 1.0)]);
        }
        SetShape::Singleton(c) => r.iter().zip(c).map(|(ri, ci)| ri.shifted(-ci)).collect(),
        SetShape::Polytope(vertices) => {
            let mu = lp.simplex(vertices.len());
            (0..set.dim())
                .map(|i| {
                    let mut e = r[i].clone();
                    for (j, v) in vertices.iter().enumerate() {
                        e.terms.push((mu[j], -v[i]));
                    }
                    e
                })
                .collect()
        }
    };
    let mut obj = Vec::new();
    match norm {
        Norm::LInf => {
            let t = lp.nonneg();
            for e in &residual {
                lp.constrain_affine(&e.plus_var(t, -1.0), Cmp::Le, 0.0);
                lp.constrain_affine(&e.negated().plus_var(t, -1.0), Cmp::Le, 0.0);
            }
            obj.push((t, 1.0));
        }
        _ => {
            for e in &residual {
                let s = lp.nonneg();
                lp.constrain_affine(&e.plus_var(s, -1.0), Cmp::Le, 0.0);
                lp.constrain_affine(&e.negated().plus_var(s, -1.0), Cmp::Le, 0.0);
                obj.push((s, 1.0));
            }
        }
    }
    Ok(obj)
}

/// Constrains `r ∈ set`.
pub(crate) fn add_membership(lp: &mut Lp, r: &[Affine], set: &TargetSet) -> Result<()> {
    if r.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            what: "constraint set",
            expected: set.dim(),
            found: r.len(),
        });
    }
    match set.shape() {
        SetShape::Whole { .. } => {}
        SetShape::NegativeOrthant { .. } => {
            for ri in r {
                lp.constrain_affine(ri, Cmp::Le, 0.0);
            }
        }
        SetShape::HalfLineBelow(theta) => lp.constrain_affine(&r[0], Cmp::Le, *theta),
        SetShape::HalfLineAbove(theta) => lp.constrain_affine(&r[0], Cmp::Ge, *theta),
        SetShape::Singleton(c) => {
            for (ri, ci) in r.iter().zip(c) {
                lp.constrain_affine(ri, Cmp::Eq, *ci);
            }
        }
        SetShape::Polytope(vertices) => {
            let mu = lp.simplex(vertices.len());
            for (i, ri) in r.iter().enumerate() {
                let mut e = ri.clone();
                for (j, v) in vertices.iter().enumerate() {
                    e.terms.push((mu[j], -v[i]));
                }
                lp.constrain_affine(&e, Cmp::Eq, 0.0);
            }
        }
    }
    Ok(())
}
