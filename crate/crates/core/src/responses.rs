//! Response functions `Ψ : K → Δ(A)`.
//!
//! The generic best response `x⋆(m)` minimizes `x ↦ d_p(x⊙m, C)` over the
//! simplex. Ties go to the lexicographically largest weight vector, i.e. the
//! lowest action index takes as much mass as the optimum allows.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{combine_weights, AffinePiece, MixedAction, PayoffMatrix, SetShape, TargetSet};
use crate::lp::{self, Affine, Cmp, Lp};
use crate::qp::SquaredDistanceQp;

/// Objective accuracy of the numerical solvers.
pub const RESPONSE_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-10;
const QP_MAX_ITER: usize = 20_000;
const GOLDEN_ITER: usize = 200;

/// A user-supplied response.
pub trait Response {
    fn respond(&self, m: &PayoffMatrix) -> Result<MixedAction>;

    fn name(&self) -> String {
        "custom".into()
    }
}

/// Payoff and cost rows of a stacked payoff vector, with their targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedProblem {
    /// Rows selected by `P`.
    pub payoff_rows: Vec<usize>,
    /// Rows selected by `G`.
    pub cost_rows: Vec<usize>,
    /// The payoff target `𝒫`.
    pub payoff_target: TargetSet,
    /// The admissible cost set `Γ`.
    pub cost_set: TargetSet,
}

impl ConstrainedProblem {
    pub fn new(
        payoff_rows: Vec<usize>,
        cost_rows: Vec<usize>,
        payoff_target: TargetSet,
        cost_set: TargetSet,
    ) -> Result<Self> {
        if payoff_rows.len() != payoff_target.dim() {
            return Err(Error::DimensionMismatch {
                what: "payoff rows vs payoff target",
                expected: payoff_target.dim(),
                found: payoff_rows.len(),
            });
        }
        if cost_rows.len() != cost_set.dim() {
            return Err(Error::DimensionMismatch {
                what: "cost rows vs cost set",
                expected: cost_set.dim(),
                found: cost_rows.len(),
            });
        }
        Ok(ConstrainedProblem {
            payoff_rows,
            cost_rows,
            payoff_target,
            cost_set,
        })
    }

    fn check(&self, m: &PayoffMatrix) -> Result<()> {
        let top = self.payoff_rows.iter().chain(&self.cost_rows).max().copied();
        match top {
            Some(i) if i >= m.d() => Err(Error::DimensionMismatch {
                what: "selected row vs payoff dimension",
                expected: m.d(),
                found: i + 1,
            }),
            _ => Ok(()),
        }
    }

    pub fn payoff_part(&self, r: &[f64]) -> Vec<f64> {
        self.payoff_rows.iter().map(|&i| r[i]).collect()
    }

    pub fn cost_part(&self, r: &[f64]) -> Vec<f64> {
        self.cost_rows.iter().map(|&i| r[i]).collect()
    }

    /// `d_p(P r, 𝒫)`.
    pub fn payoff_distance(&self, r: &[f64]) -> Result<f64> {
        self.payoff_target.distance(&self.payoff_part(r))
    }

    /// `d_p(G r, Γ)`.
    pub fn cost_distance(&self, r: &[f64]) -> Result<f64> {
        self.cost_set.distance(&self.cost_part(r))
    }
}

#[derive(Clone)]
pub enum ResponseFunction {
    /// Best response to `m` for the target set.
    XStar { target: TargetSet },
    /// Best payoff response subject to the cost constraint.
    ConstrainedXStar(ConstrainedProblem),
    Constant(MixedAction),
    /// Closed-form best response of the two-segment orthant example.
    Example1XStar,
    /// Closed-form best response of the scalar square example.
    Example2XStar,
    Custom(Arc<dyn Response + Send + Sync>),
}

impl fmt::Debug for ResponseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResponseFunction::XStar { target } => f.debug_struct("XStar").field("target", target).finish(),
            ResponseFunction::ConstrainedXStar(p) => f.debug_tuple("ConstrainedXStar").field(p).finish(),
            ResponseFunction::Constant(x) => f.debug_tuple("Constant").field(x).finish(),
            ResponseFunction::Example1XStar => f.write_str("Example1XStar"),
            ResponseFunction::Example2XStar => f.write_str("Example2XStar"),
            ResponseFunction::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

impl ResponseFunction {
    pub fn respond(&self, m: &PayoffMatrix) -> Result<MixedAction> {
        match self {
            ResponseFunction::XStar { target } => best_response(m, target),
            ResponseFunction::ConstrainedXStar(problem) => constrained_best_response(m, problem),
            ResponseFunction::Constant(x) => {
                if x.len() != m.actions() {
                    return Err(Error::DimensionMismatch {
                        what: "constant response vs payoff columns",
                        expected: m.actions(),
                        found: x.len(),
                    });
                }
                Ok(x.clone())
            }
            ResponseFunction::Example1XStar => example1_xstar(m),
            ResponseFunction::Example2XStar => example2_xstar(m),
            ResponseFunction::Custom(c) => c.respond(m),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ResponseFunction::XStar { .. } => "xstar".into(),
            ResponseFunction::ConstrainedXStar(_) => "constrained-xstar".into(),
            ResponseFunction::Constant(x) => format!("constant{:?}", x.weights()),
            ResponseFunction::Example1XStar => "example1-xstar".into(),
            ResponseFunction::Example2XStar => "example2-xstar".into(),
            ResponseFunction::Custom(c) => c.name(),
        }
    }
}

pub fn respond(psi: &ResponseFunction, m: &PayoffMatrix) -> Result<MixedAction> {
    psi.respond(m)
}

pub fn respond_constrained(problem: &ConstrainedProblem, m: &PayoffMatrix) -> Result<MixedAction> {
    constrained_best_response(m, problem)
}

/// The two vertices of the first example's segment: `m†` and `m♯`.
pub fn example1_vertices() -> (PayoffMatrix, PayoffMatrix) {
    let dagger = PayoffMatrix::from_columns(&[vec![3.0, 4.0], vec![0.0, 5.0]]).expect("finite constants");
    let sharp = PayoffMatrix::from_columns(&[vec![4.0, 3.0], vec![5.0, 0.0]]).expect("finite constants");
    (dagger, sharp)
}

/// `m(ν) = ν m† + (1 − ν) m♯`.
pub fn example1_matrix(nu: f64) -> PayoffMatrix {
    let (dagger, sharp) = example1_vertices();
    sharp.lerp(&dagger, nu)
}

/// Least-squares `ν` of `m` on the segment, clamped to `[0, 1]`.
pub fn example1_nu(m: &PayoffMatrix) -> Result<f64> {
    if m.d() != 2 || m.actions() != 2 {
        return Err(Error::DimensionMismatch {
            what: "payoff entries for the segment example",
            expected: 4,
            found: m.entries().len(),
        });
    }
    let (dagger, sharp) = example1_vertices();
    let mut num = 0.0;
    let mut den = 0.0;
    for ((x, s), d) in m.entries().iter().zip(sharp.entries()).zip(dagger.entries()) {
        num += (x - s) * (d - s);
        den += (d - s) * (d - s);
    }
    Ok((num / den).clamp(0.0, 1.0))
}

fn example1_xstar(m: &PayoffMatrix) -> Result<MixedAction> {
    let nu = example1_nu(m)?;
    Ok(if nu > 0.25 && nu < 0.75 {
        MixedAction::pure(2, 1)
    } else {
        MixedAction::pure(2, 0)
    })
}

/// Reads `(v, w)` from a `1 × 2` payoff matrix.
pub fn example2_coords(m: &PayoffMatrix) -> Result<(f64, f64)> {
    if m.d() != 1 || m.actions() != 2 {
        return Err(Error::DimensionMismatch {
            what: "payoff entries for the square example",
            expected: 2,
            found: m.entries().len(),
        });
    }
    Ok((m.get(0, 0), m.get(0, 1)))
}

fn example2_xstar(m: &PayoffMatrix) -> Result<MixedAction> {
    let (v, w) = example2_coords(m)?;
    Ok(example2_xstar_vw(v, w))
}

pub fn example2_xstar_vw(v: f64, w: f64) -> MixedAction {
    if v * w <= 0.0 {
        let total = v.abs() + w.abs();
        if total == 0.0 {
            return MixedAction::pure(2, 0);
        }
        return MixedAction::new(vec![w.abs() / total, v.abs() / total]).expect("non-negative weights");
    }
    if (v > 0.0 && v <= w) || (v < 0.0 && v >= w) {
        MixedAction::pure(2, 0)
    } else {
        MixedAction::pure(2, 1)
    }
}

/// `x⋆(m)` for a general target set.
pub fn best_response(m: &PayoffMatrix, target: &TargetSet) -> Result<MixedAction> {
    if m.d() != target.dim() {
        return Err(Error::DimensionMismatch {
            what: "payoff dimension vs target set",
            expected: target.dim(),
            found: m.d(),
        });
    }
    match m.actions() {
        1 => Ok(MixedAction::pure(1, 0)),
        2 => {
            let f = |s: f64| target.distance(&combine_weights(&[s, 1.0 - s], m));
            let pieces = target.affine_pieces().map(|p| pieces_along(&p, m, &|r| r.to_vec()));
            let s = minimize_on_interval(&f, pieces.as_deref(), 0.0, 1.0)?;
            Ok(MixedAction::new(vec![s, 1.0 - s])?)
        }
        _ if lp::distance_is_polyhedral(target) => {
            let mut program = Lp::new();
            let x = program.simplex(m.actions());
            let r = payoff_affine(m, &x, &(0..m.d()).collect::<Vec<_>>());
            let objective = lp::add_distance(&mut program, &r, target)?;
            lexicographic(program, &x, &objective)
        }
        _ => euclidean_best_response(m, target),
    }
}

/// `φ⋆(m) = min_x d_p(x⊙m, C)`.
pub fn phi_star(m: &PayoffMatrix, target: &TargetSet) -> Result<f64> {
    let x = best_response(m, target)?;
    target.distance(&combine_weights(x.weights(), m))
}

fn euclidean_best_response(m: &PayoffMatrix, target: &TargetSet) -> Result<MixedAction> {
    let actions = m.actions();
    let mut columns: Vec<Vec<f64>> = m.columns().map(<[f64]>::to_vec).collect();
    let mut blocks = vec![0..actions];
    let identity = |y: &[f64]| y.to_vec();
    let zero = |y: &[f64]| vec![0.0; y.len()];
    let closed_form = |y: &[f64]| target.euclidean_projection(y).expect("shape has a projection");
    let project: &dyn Fn(&[f64]) -> Vec<f64> = match target.shape() {
        SetShape::Polytope(vertices) => {
            columns.extend(vertices.iter().map(|v| v.iter().map(|c| -c).collect()));
            blocks.push(actions..actions + vertices.len());
            &zero
        }
        SetShape::Whole { .. } => &identity,
        _ => &closed_form,
    };
    let origin = vec![0.0; m.d()];
    let qp = SquaredDistanceQp {
        columns: &columns,
        blocks: &blocks,
        offset: &origin,
        project,
    };
    let start: Vec<f64> = blocks
        .iter()
        .flat_map(|b| vec![1.0 / b.len() as f64; b.len()])
        .collect();
    let out = qp.solve(start, RESPONSE_TOL * RESPONSE_TOL, QP_MAX_ITER);
    let best = MixedAction::new(out.z[..actions].to_vec())?;
    if !out.converged && out.gap > RESPONSE_TOL {
        return Err(Error::NonConvergence {
            best,
            objective: (2.0 * out.value).sqrt(),
            iterations: out.iterations,
        });
    }
    Ok(best)
}

/// Constrained best response for sample-path constraints.
pub fn constrained_best_response(m: &PayoffMatrix, problem: &ConstrainedProblem) -> Result<MixedAction> {
    problem.check(m)?;
    let payoff_of = |s: &[f64]| problem.payoff_distance(&combine_weights(s, m));
    let cost_of = |s: &[f64]| problem.cost_distance(&combine_weights(s, m));
    match m.actions() {
        1 => {
            if cost_of(&[1.0])? > TIE_TOL {
                return Err(Error::Infeasible("the only action violates the cost constraint".into()));
            }
            Ok(MixedAction::pure(1, 0))
        }
        2 => {
            let g = |s: f64| cost_of(&[s, 1.0 - s]);
            let f = |s: f64| payoff_of(&[s, 1.0 - s]);
            let cost_pieces = problem
                .cost_set
                .affine_pieces()
                .map(|p| pieces_along(&p, m, &|r| problem.cost_part(r)));
            let payoff_pieces = problem
                .payoff_target
                .affine_pieces()
                .map(|p| pieces_along(&p, m, &|r| problem.payoff_part(r)));
            let (lo, hi) = feasible_interval(&g, cost_pieces.as_deref())?;
            let s = minimize_on_interval(&f, payoff_pieces.as_deref(), lo, hi)?;
            Ok(MixedAction::new(vec![s, 1.0 - s])?)
        }
        _ => {
            if !lp::distance_is_polyhedral(&problem.payoff_target) {
                return Err(Error::Unsupported(
                    "constrained response with a Euclidean multi-dimensional payoff target needs A ≤ 2".into(),
                ));
            }
            let mut program = Lp::new();
            let x = program.simplex(m.actions());
            let cost = payoff_affine(m, &x, &problem.cost_rows);
            lp::add_membership(&mut program, &cost, &problem.cost_set)?;
            let payoff = payoff_affine(m, &x, &problem.payoff_rows);
            let objective = lp::add_distance(&mut program, &payoff, &problem.payoff_target)?;
            lexicographic(program, &x, &objective).map_err(|e| match e {
                Error::Infeasible(_) => Error::Infeasible("no mixed action meets the cost constraint".into()),
                other => other,
            })
        }
    }
}

/// Rows of `x ⊙ m` as affine expressions of the LP variables `x`.
fn payoff_affine(m: &PayoffMatrix, x: &[usize], rows: &[usize]) -> Vec<Affine> {
    rows.iter()
        .map(|&i| Affine {
            terms: x.iter().enumerate().map(|(a, &v)| (v, m.get(i, a))).collect(),
            constant: 0.0,
        })
        .collect()
}

/// Minimizes the objective, then maximizes `x_0`, `x_1`, … over the optimal face.
fn lexicographic(mut program: Lp, x: &[usize], objective: &[(usize, f64)]) -> Result<MixedAction> {
    program.set_objective(objective);
    let best = program.solve(false)?.objective;
    program.constrain(objective.to_vec(), Cmp::Le, best + TIE_TOL * (1.0 + best.abs()));
    let mut last = None;
    for &v in &x[..x.len() - 1] {
        program.set_objective(&[(v, 1.0)]);
        let sol = program.solve(true)?;
        let value = sol.objective;
        program.constrain(vec![(v, 1.0)], Cmp::Ge, value - TIE_TOL);
        last = Some(sol.values);
    }
    let values = match last {
        Some(v) => v,
        None => {
            program.set_objective(objective);
            program.solve(false)?.values
        }
    };
    // The optimal face was relaxed by TIE_TOL; drop the resulting dust.
    MixedAction::new(
        x.iter()
            .map(|&v| if values[v] < 1e-9 { 0.0 } else { values[v] })
            .collect(),
    )
}

/// Restricts each piece to the line `s ↦ (s, 1 − s) ⊙ m`, giving `(slope, intercept)`.
fn pieces_along(
    pieces: &[AffinePiece],
    m: &PayoffMatrix,
    select: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Vec<(f64, f64)> {
    let at0 = select(m.column(1));
    let at1 = select(m.column(0));
    pieces
        .iter()
        .map(|p| {
            let b = p.eval(&at0);
            (p.eval(&at1) - b, b)
        })
        .collect()
}

fn max_of_lines(lines: &[(f64, f64)], s: f64) -> f64 {
    lines.iter().map(|(a, b)| a * s + b).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimizes a convex function of `s ∈ [lo, hi]` and returns the largest
/// minimizer. With `lines` the function is their maximum and the answer is exact.
fn minimize_on_interval(
    f: &dyn Fn(f64) -> Result<f64>,
    lines: Option<&[(f64, f64)]>,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if let Some(lines) = lines {
        let mut candidates = vec![lo, hi];
        for (i, (a1, b1)) in lines.iter().enumerate() {
            for (a2, b2) in &lines[i + 1..] {
                if a1 != a2 {
                    let s = (b2 - b1) / (a1 - a2);
                    if s > lo && s < hi {
                        candidates.push(s);
                    }
                }
            }
        }
        let values: Vec<f64> = candidates.iter().map(|&s| max_of_lines(lines, s)).collect();
        let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let tol = TIE_TOL * (1.0 + best.abs());
        let s = candidates
            .iter()
            .zip(&values)
            .filter(|(_, v)| **v <= best + tol)
            .map(|(s, _)| *s)
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(s);
    }
    let (mut a, mut b) = (lo, hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITER {
        if b - a < 1e-13 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let mut s = (a + b) / 2.0;
    let mut best = f(s)?;
    for end in [lo, hi] {
        let v = f(end)?;
        if v < best {
            best = v;
            s = end;
        }
    }
    // Push right along the optimal plateau.
    let tol = RESPONSE_TOL * (1.0 + best.abs());
    if f(hi)? <= best + tol {
        return Ok(hi);
    }
    let (mut inside, mut outside) = (s, hi);
    for _ in 0..100 {
        let mid = (inside + outside) / 2.0;
        if f(mid)? <= best + tol {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

/// Interval of `s ∈ [0, 1]` where the convex function `g` is zero.
fn feasible_interval(g: &dyn Fn(f64) -> Result<f64>, lines: Option<&[(f64, f64)]>) -> Result<(f64, f64)> {
    if let Some(lines) = lines {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for &(a, b) in lines {
            // a·s + b ≤ 0
            if a.abs() <= 1e-15 {
                if b > TIE_TOL {
                    lo = 1.0;
                    hi = 0.0;
                }
            } else if a > 0.0 {
                hi = hi.min(-b / a);
            } else {
                lo = lo.max(-b / a);
            }
        }
        if lo > hi + TIE_TOL {
            return Err(Error::Infeasible("no mixed action meets the cost constraint".into()));
        }
        return Ok((lo.min(hi), hi.max(lo)));
    }
    let best = minimize_on_interval(g, None, 0.0, 1.0)?;
    if g(best)? > RESPONSE_TOL {
        return Err(Error::Infeasible("no mixed action meets the cost constraint".into()));
    }
    let edge = |outside: f64| -> Result<f64> {
        if g(outside)? <= RESPONSE_TOL {
            return Ok(outside);
        }
        let (mut inside, mut out) = (best, outside);
        for _ in 0..100 {
            let mid = (inside + out) / 2.0;
            if g(mid)? <= RESPONSE_TOL {
                inside = mid;
            } else {
                out = mid;
            }
        }
        Ok(inside)
    };
    Ok((edge(0.0)?, edge(1.0)?))
}

/// Nearest-neighbour lookup in a table of `m ↦ x` pairs.
#[derive(Debug, Clone)]
pub struct TabulatedResponse {
    points: Vec<PayoffMatrix>,
    actions: Vec<MixedAction>,
}

impl TabulatedResponse {
    pub fn new(points: Vec<PayoffMatrix>, actions: Vec<MixedAction>) -> Result<Self> {
        if points.is_empty() || points.len() != actions.len() {
            return Err(Error::InvalidInput(
                "table needs the same positive number of matrices and actions".into(),
            ));
        }
        Ok(TabulatedResponse { points, actions })
    }

    /// Reads a CSV whose header has columns `m_<i>_<a>` and `x_<a>`.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let header = csv.headers()?.clone();
        let mut m_cols = Vec::new();
        let mut x_cols = Vec::new();
        for (k, name) in header.iter().enumerate() {
            let name = name.trim();
            if let Some(rest) = name.strip_prefix("m_") {
                let (i, a) = rest
                    .split_once('_')
                    .and_then(|(i, a)| Some((i.parse::<usize>().ok()?, a.parse::<usize>().ok()?)))
                    .ok_or_else(|| Error::InvalidInput(format!("bad table column `{name}`")))?;
                m_cols.push((k, i, a));
            } else if let Some(a) = name.strip_prefix("x_") {
                let a = a
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad table column `{name}`")))?;
                x_cols.push((k, a));
            } else {
                return Err(Error::InvalidInput(format!("unknown table column `{name}`")));
            }
        }
        let d = m_cols.iter().map(|c| c.1 + 1).max().unwrap_or(0);
        let actions = x_cols.iter().map(|c| c.1 + 1).max().unwrap_or(0);
        if m_cols.len() != d * actions || x_cols.len() != actions {
            return Err(Error::InvalidInput("table header does not cover a full d × A matrix".into()));
        }
        let mut points = Vec::new();
        let mut xs = Vec::new();
        for row in csv.records() {
            let row = row?;
            let num = |k: usize| -> Result<f64> {
                row[k]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad number `{}` in table", &row[k])))
            };
            let mut entries = vec![0.0; d * actions];
            for &(k, i, a) in &m_cols {
                entries[a * d + i] = num(k)?;
            }
            let mut weights = vec![0.0; actions];
            for &(k, a) in &x_cols {
                weights[a] = num(k)?;
            }
            points.push(PayoffMatrix::new(d, actions, entries)?);
            xs.push(MixedAction::new(weights)?);
        }
        Self::new(points, xs)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }
}

impl Response for TabulatedResponse {
    fn respond(&self, m: &PayoffMatrix) -> Result<MixedAction> {
        let mut best = (f64::INFINITY, 0);
        for (k, p) in self.points.iter().enumerate() {
            if !p.same_shape(m) {
                return Err(Error::DimensionMismatch {
                    what: "payoff matrix vs table entries",
                    expected: p.entries().len(),
                    found: m.entries().len(),
                });
            }
            let d = p.distance(m);
            if d < best.0 {
                best = (d, k);
            }
        }
        Ok(self.actions[best.1].clone())
    }

    fn name(&self) -> String {
        format!("table[{}]", self.points.len())
    }
}
