//! Target functions `φ : K → [0, ∞)` and their numerical oracles.
//!
//! The concavification and decomposition-based targets depend on the whole
//! opponent set `K`, so they are only computed on low-dimensional
//! parameterizations of it (a point, a segment or a rectangle).

pub mod closed_form;
pub mod envelope;

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{combine, combine_weights, MixedAction, PayoffMatrix, TargetSet};
use crate::responses::{self, example1_nu, example2_coords, ConstrainedProblem, ResponseFunction};

pub use envelope::{upper_envelope_1d, upper_envelope_2d, UpperHull1d, UpperHull2d};

/// An affine parameterization `p ↦ m(p)` of (a piece of) the opponent set.
#[derive(Debug, Clone, PartialEq)]
pub enum Parameterization {
    Point(PayoffMatrix),
    /// `m(s) = (1 − s)·start + s·end`, `s ∈ [0, 1]`.
    Segment { start: PayoffMatrix, end: PayoffMatrix },
    /// `m(u, v) = origin + u·u_axis + v·v_axis` on a rectangle.
    Rectangle {
        origin: PayoffMatrix,
        u_axis: PayoffMatrix,
        v_axis: PayoffMatrix,
        u_range: (f64, f64),
        v_range: (f64, f64),
    },
}

impl Parameterization {
    /// The first example's segment, parameterized by `ν` (`m♯` at 0, `m†` at 1).
    pub fn example1() -> Self {
        let (dagger, sharp) = responses::example1_vertices();
        Parameterization::Segment {
            start: sharp,
            end: dagger,
        }
    }

    /// The second example's square `[−1, 1]²`, parameterized by `(v, w)`.
    pub fn example2() -> Self {
        let unit = |a: usize| {
            let mut e = vec![0.0; 2];
            e[a] = 1.0;
            PayoffMatrix::new(1, 2, e).expect("finite")
        };
        Parameterization::Rectangle {
            origin: PayoffMatrix::zeros(1, 2),
            u_axis: unit(0),
            v_axis: unit(1),
            u_range: (-1.0, 1.0),
            v_range: (-1.0, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Parameterization::Point(_) => 0,
            Parameterization::Segment { .. } => 1,
            Parameterization::Rectangle { .. } => 2,
        }
    }

    pub fn point(&self, p: &[f64]) -> PayoffMatrix {
        match self {
            Parameterization::Point(m) => m.clone(),
            Parameterization::Segment { start, end } => start.lerp(end, p[0]),
            Parameterization::Rectangle {
                origin, u_axis, v_axis, ..
            } => {
                let mut m = origin.clone();
                m.add_scaled(u_axis, p[0]);
                m.add_scaled(v_axis, p[1]);
                m
            }
        }
    }

    /// Least-squares parameters of `m`, clamped to the domain.
    pub fn locate(&self, m: &PayoffMatrix) -> Vec<f64> {
        let diff = |base: &PayoffMatrix| -> Vec<f64> {
            m.entries().iter().zip(base.entries()).map(|(a, b)| a - b).collect()
        };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match self {
            Parameterization::Point(_) => Vec::new(),
            Parameterization::Segment { start, end } => {
                let dir: Vec<f64> = end.entries().iter().zip(start.entries()).map(|(a, b)| a - b).collect();
                let s = dot(&diff(start), &dir) / dot(&dir, &dir);
                vec![s.clamp(0.0, 1.0)]
            }
            Parameterization::Rectangle {
                origin,
                u_axis,
                v_axis,
                u_range,
                v_range,
            } => {
                let r = diff(origin);
                let (a, b) = (u_axis.entries(), v_axis.entries());
                let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
                let (ra, rb) = (dot(&r, a), dot(&r, b));
                let det = aa * bb - ab * ab;
                let u = (ra * bb - rb * ab) / det;
                let v = (rb * aa - ra * ab) / det;
                vec![u.clamp(u_range.0, u_range.1), v.clamp(v_range.0, v_range.1)]
            }
        }
    }

    /// Regular grid with `resolution` points per axis.
    pub fn grid(&self, resolution: usize) -> Vec<Vec<f64>> {
        let axis = |lo: f64, hi: f64| -> Vec<f64> {
            let n = resolution.max(2);
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        };
        match self {
            Parameterization::Point(_) => vec![Vec::new()],
            Parameterization::Segment { .. } => axis(0.0, 1.0).into_iter().map(|s| vec![s]).collect(),
            Parameterization::Rectangle { u_range, v_range, .. } => {
                let us = axis(u_range.0, u_range.1);
                let vs = axis(v_range.0, v_range.1);
                us.iter().flat_map(|&u| vs.iter().map(move |&v| vec![u, v])).collect()
            }
        }
    }

    /// The vertices of the parameterized set.
    pub fn vertices(&self) -> Vec<PayoffMatrix> {
        match self {
            Parameterization::Point(m) => vec![m.clone()],
            Parameterization::Segment { start, end } => vec![start.clone(), end.clone()],
            Parameterization::Rectangle { u_range, v_range, .. } => [
                [u_range.0, v_range.0],
                [u_range.1, v_range.0],
                [u_range.1, v_range.1],
                [u_range.0, v_range.1],
            ]
            .iter()
            .map(|p| self.point(p))
            .collect(),
        }
    }
}

/// `φ⋆(m) = min_x d_p(x⊙m, C)`.
pub fn phi_star(m: &PayoffMatrix, target: &TargetSet) -> Result<f64> {
    responses::phi_star(m, target)
}

/// `α_x(m) = d_p(x⊙m, C)`, the target reached by always playing `x`.
pub fn alpha_x(m: &PayoffMatrix, x: &MixedAction, target: &TargetSet) -> Result<f64> {
    target.distance(&combine(x, m)?)
}

/// Upper concave envelope of values sampled on a parameter grid (1-D or 2-D).
pub fn cav_oracle(grid: &[Vec<f64>], values: &[f64]) -> Result<Vec<f64>> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("envelope needs at least two grid points".into()));
    }
    match grid[0].len() {
        1 => {
            let xs: Vec<f64> = grid.iter().map(|p| p[0]).collect();
            upper_envelope_1d(&xs, values)
        }
        2 => {
            let pts: Vec<[f64; 2]> = grid.iter().map(|p| [p[0], p[1]]).collect();
            upper_envelope_2d(&pts, values)
        }
        k => Err(Error::Unsupported(format!("envelopes in parameter dimension {k}"))),
    }
}

/// `max` over a parameter grid of `φ⋆`: a grid estimate of the value
/// `max_m min_x d(x⊙m, C)`.
pub fn alpha_unif_estimate(param: &Parameterization, target: &TargetSet, resolution: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for p in param.grid(resolution) {
        best = best.max(phi_star(&param.point(&p), target)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    One,
    Two,
}

/// Grid-based lower bound on
/// `φ^Ψ(m) = sup { d_p(Σ λ_i Ψ(m_i)⊙m_i, C) : Σ λ_i m_i = m }`.
///
/// Atoms `m_i` range over a grid of the parameterization plus the query
/// itself. When `d_p(·, C)` is a maximum of affine pieces and the budget is
/// at least `dim + 1`, the supremum over the grid is computed exactly as the
/// maximum over pieces of the concave envelope of the piece composed with
/// `m ↦ Ψ(m)⊙m`. Otherwise decompositions are enumerated directly (pairs on
/// segments, pairs and triples on rectangles).
#[derive(Debug)]
pub struct PhiPsiOracle {
    response: ResponseFunction,
    target: TargetSet,
    rows: Option<Vec<usize>>,
    param: Parameterization,
    budget: usize,
    pool: Vec<Vec<f64>>,
    rho: Vec<Vec<f64>>,
    hulls: Option<Vec<Hull>>,
}

#[derive(Debug)]
enum Hull {
    One(UpperHull1d),
    Two(UpperHull2d),
}

impl PhiPsiOracle {
    pub fn new(
        response: ResponseFunction,
        target: TargetSet,
        param: Parameterization,
        budget: usize,
        resolution: usize,
    ) -> Result<Self> {
        Self::build(response, target, None, param, budget, resolution)
    }

    /// The constrained variant: only `rows` of `Ψ(m)⊙m` are compared with `target`.
    pub fn constrained(problem: &ConstrainedProblem, param: Parameterization, resolution: usize) -> Result<Self> {
        let budget = param.dim() + 1;
        Self::build(
            ResponseFunction::ConstrainedXStar(problem.clone()),
            problem.payoff_target.clone(),
            Some(problem.payoff_rows.clone()),
            param,
            budget,
            resolution,
        )
    }

    fn build(
        response: ResponseFunction,
        target: TargetSet,
        rows: Option<Vec<usize>>,
        param: Parameterization,
        budget: usize,
        resolution: usize,
    ) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidInput("decomposition budget must be ≥ 1".into()));
        }
        let vertex = param.point(&vec![0.0; param.dim()]);
        let cap = vertex.d() * vertex.actions() + 1;
        let budget = budget.min(cap);
        let pool = param.grid(resolution);
        let mut oracle = PhiPsiOracle {
            response,
            target,
            rows,
            param,
            budget,
            pool,
            rho: Vec::new(),
            hulls: None,
        };
        oracle.rho = oracle
            .pool
            .iter()
            .map(|p| oracle.rho_at(&oracle.param.point(p)))
            .collect::<Result<_>>()?;
        let dim = oracle.param.dim();
        if dim > 0 && oracle.budget > dim {
            if let Some(pieces) = oracle.target.affine_pieces() {
                let mut hulls = Vec::with_capacity(pieces.len());
                for piece in &pieces {
                    let vals: Vec<f64> = oracle.rho.iter().map(|r| piece.eval(r)).collect();
                    hulls.push(if dim == 1 {
                        let xs: Vec<f64> = oracle.pool.iter().map(|p| p[0]).collect();
                        Hull::One(UpperHull1d::new(&xs, &vals)?)
                    } else {
                        let pts: Vec<[f64; 2]> = oracle.pool.iter().map(|p| [p[0], p[1]]).collect();
                        Hull::Two(UpperHull2d::new(pts, vals)?)
                    });
                }
                oracle.hulls = Some(hulls);
            }
        }
        Ok(oracle)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn param(&self) -> &Parameterization {
        &self.param
    }

    fn rho_at(&self, m: &PayoffMatrix) -> Result<Vec<f64>> {
        let x = self.response.respond(m)?;
        let r = combine_weights(x.weights(), m);
        Ok(match &self.rows {
            Some(rows) => rows.iter().map(|&i| r[i]).collect(),
            None => r,
        })
    }

    /// Value at the parameter point `p`.
    pub fn eval_param(&self, p: &[f64]) -> Result<f64> {
        let own = self.rho_at(&self.param.point(p))?;
        let direct = self.target.distance(&own)?;
        if self.budget == 1 || self.param.dim() == 0 {
            return Ok(direct);
        }
        if let (Some(hulls), Some(pieces)) = (&self.hulls, self.target.affine_pieces()) {
            let mut best = direct;
            for (hull, piece) in hulls.iter().zip(&pieces) {
                let env = match hull {
                    Hull::One(h) => h.eval(p[0]),
                    Hull::Two(h) => h.eval([p[0], p[1]])?,
                };
                best = best.max(env.max(piece.eval(&own)));
            }
            return Ok(best.max(0.0));
        }
        self.brute_force(p, &own, direct)
    }

    fn brute_force(&self, p: &[f64], own: &[f64], direct: f64) -> Result<f64> {
        let mut best = direct;
        let mix = |pairs: &[(f64, &[f64])]| -> Vec<f64> {
            let mut r = vec![0.0; own.len()];
            for (l, v) in pairs {
                for (ri, vi) in r.iter_mut().zip(v.iter()) {
                    *ri += l * vi;
                }
            }
            r
        };
        let n = self.pool.len();
        if self.param.dim() == 1 {
            let q = p[0];
            for i in 0..n {
                let a = self.pool[i][0];
                for j in 0..n {
                    let b = self.pool[j][0];
                    if a < q && b > q {
                        let l = (b - q) / (b - a);
                        let r = mix(&[(l, &self.rho[i]), (1.0 - l, &self.rho[j])]);
                        best = best.max(self.target.distance(&r)?);
                    }
                }
                // Pairs with the query as one atom never beat the endpoints.
            }
            return Ok(best);
        }
        let q = [p[0], p[1]];
        for i in 0..n {
            let a = [self.pool[i][0], self.pool[i][1]];
            for j in (i + 1)..n {
                let b = [self.pool[j][0], self.pool[j][1]];
                // Pairs whose segment passes through q.
                let cross = (a[0] - q[0]) * (b[1] - q[1]) - (a[1] - q[1]) * (b[0] - q[0]);
                let dotp = (a[0] - q[0]) * (b[0] - q[0]) + (a[1] - q[1]) * (b[1] - q[1]);
                if cross.abs() < 1e-12 && dotp < 0.0 {
                    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                    let l = ((b[0] - q[0]).powi(2) + (b[1] - q[1]).powi(2)).sqrt() / len;
                    let r = mix(&[(l, &self.rho[i]), (1.0 - l, &self.rho[j])]);
                    best = best.max(self.target.distance(&r)?);
                }
                if self.budget < 3 {
                    continue;
                }
                for k in (j + 1)..n {
                    let c = [self.pool[k][0], self.pool[k][1]];
                    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
                    if det.abs() < 1e-14 {
                        continue;
                    }
                    let l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (q[1] - a[1])) / det;
                    let l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1])) / det;
                    let l0 = 1.0 - l1 - l2;
                    if l0 < 0.0 || l1 < 0.0 || l2 < 0.0 {
                        continue;
                    }
                    let r = mix(&[(l0, &self.rho[i]), (l1, &self.rho[j]), (l2, &self.rho[k])]);
                    best = best.max(self.target.distance(&r)?);
                }
            }
        }
        Ok(best)
    }

    pub fn eval(&self, m: &PayoffMatrix) -> Result<f64> {
        self.eval_param(&self.param.locate(m))
    }
}

/// A target function `K → [0, ∞)`.
#[derive(Debug, Clone)]
pub enum TargetFunction {
    PhiStar { target: TargetSet },
    CavPhiStarClosedForm(Example),
    PhiPsiClosedForm(Example),
    PhiPsiOracle(Arc<PhiPsiOracle>),
    /// `α_x`, reached by constant play of `action`.
    AlphaX { action: MixedAction, target: TargetSet },
    /// The same oracle built for a constrained response.
    ConstrainedPhiPsi(Arc<PhiPsiOracle>),
    /// `m ↦ d_p(Ψ(m)⊙m, C)`, the single-atom value.
    Direct { response: ResponseFunction, target: TargetSet },
}

impl TargetFunction {
    pub fn eval(&self, m: &PayoffMatrix) -> Result<f64> {
        match self {
            TargetFunction::PhiStar { target } => phi_star(m, target),
            TargetFunction::CavPhiStarClosedForm(Example::One) => Ok(closed_form::example1_cav(example1_nu(m)?)),
            TargetFunction::CavPhiStarClosedForm(Example::Two) => {
                let (v, w) = example2_coords(m)?;
                Ok(closed_form::example2_cav(v, w))
            }
            TargetFunction::PhiPsiClosedForm(Example::One) => {
                Ok(closed_form::example1_phi_xstar(example1_nu(m)?))
            }
            TargetFunction::PhiPsiClosedForm(Example::Two) => {
                let (v, w) = example2_coords(m)?;
                Ok(closed_form::example2_phi_xstar(v, w))
            }
            TargetFunction::PhiPsiOracle(o) | TargetFunction::ConstrainedPhiPsi(o) => o.eval(m),
            TargetFunction::AlphaX { action, target } => alpha_x(m, action, target),
            TargetFunction::Direct { response, target } => {
                target.distance(&combine(&response.respond(m)?, m)?)
            }
        }
    }
}

/// Distance from `(m̄, r̄)` to the graph `{(m, r) : r ∈ C_{φ(m)}}`, using the
/// candidates `m(p)` for grid points `p` and the located `m̄`.
///
/// Each candidate contributes `√(‖m̄ − m(p)‖² + d_p(r̄, C_{φ(m(p))})²)`.
pub fn graph_distance(
    m_bar: &PayoffMatrix,
    r_bar: &[f64],
    phi: &dyn Fn(&PayoffMatrix) -> Result<f64>,
    target: &TargetSet,
    param: &Parameterization,
    resolution: usize,
) -> Result<f64> {
    let mut candidates = param.grid(resolution);
    candidates.push(param.locate(m_bar));
    let mut best = f64::INFINITY;
    for p in candidates {
        let m = param.point(&p);
        let dm = m_bar.distance(&m);
        if dm >= best {
            continue;
        }
        let dr = target.distance_to_expansion(r_bar, phi(&m)?)?;
        best = best.min((dm * dm + dr * dr).sqrt());
    }
    Ok(best)
}

/// Writes `params…, value` rows for plotting.
pub fn write_grid_csv(out: impl Write, header: &[&str], grid: &[Vec<f64>], values: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (p, v) in grid.iter().zip(values) {
        let row: Vec<String> = p.iter().chain(v).map(|x| format!("{x:.16e}")).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::closed_form::*;
    use super::*;
    use crate::geometry::Norm;
    use crate::responses::example1_matrix;

    fn orthant() -> TargetSet {
        TargetSet::negative_orthant(2, Norm::LInf).unwrap()
    }

    fn zero() -> TargetSet {
        TargetSet::singleton(vec![0.0], Norm::L2).unwrap()
    }

    #[test]
    fn phi_star_examples() {
        assert!((phi_star(&example1_matrix(0.5), &orthant()).unwrap() - 2.5).abs() < 1e-9);
        assert!((phi_star(&example1_matrix(1.0), &orthant()).unwrap() - 4.0).abs() < 1e-9);
        let m = PayoffMatrix::new(1, 2, vec![0.5, -0.5]).unwrap();
        assert!(phi_star(&m, &zero()).unwrap() < 1e-9);
    }

    #[test]
    fn alpha_examples() {
        let m = example1_matrix(0.5);
        assert!((alpha_x(&m, &MixedAction::pure(2, 0), &orthant()).unwrap() - 3.5).abs() < 1e-12);
        assert!((alpha_x(&m, &MixedAction::pure(2, 1), &orthant()).unwrap() - 2.5).abs() < 1e-12);
        let origin = PayoffMatrix::new(1, 2, vec![0.0, 0.0]).unwrap();
        assert_eq!(alpha_x(&origin, &MixedAction::uniform(2), &zero()).unwrap(), 0.0);
    }

    #[test]
    fn example1_envelope_is_four() {
        let param = Parameterization::example1();
        let grid = param.grid(1001);
        let vals: Vec<f64> = grid.iter().map(|p| example1_phi_star(p[0])).collect();
        let env = cav_oracle(&grid, &vals).unwrap();
        assert!(env.iter().all(|v| (v - 4.0).abs() < 1e-9));
    }

    #[test]
    fn phi_psi_single_atom_budget() {
        let oracle = PhiPsiOracle::new(ResponseFunction::Example1XStar, orthant(), Parameterization::example1(), 1, 101)
            .unwrap();
        for k in 0..=10 {
            let nu = k as f64 / 10.0;
            let m = example1_matrix(nu);
            let x = ResponseFunction::Example1XStar.respond(&m).unwrap();
            let direct = orthant().distance(&combine(&x, &m).unwrap()).unwrap();
            assert!((oracle.eval_param(&[nu]).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_psi_example1_is_alpha_one() {
        let oracle = PhiPsiOracle::new(ResponseFunction::Example1XStar, orthant(), Parameterization::example1(), 5, 1001)
            .unwrap();
        for k in 0..=20 {
            let nu = k as f64 / 20.0;
            let v = oracle.eval_param(&[nu]).unwrap();
            assert!((v - example1_phi_xstar(nu)).abs() < 1e-3, "ν = {nu}: {v}");
        }
    }

    #[test]
    fn phi_psi_example2_origin() {
        let oracle =
            PhiPsiOracle::new(ResponseFunction::Example2XStar, zero(), Parameterization::example2(), 3, 101).unwrap();
        let v = oracle.eval_param(&[0.0, 0.0]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 5e-2, "{v}");
    }

    #[test]
    fn brute_force_agrees_with_envelope_in_1d() {
        // Euclidean distance in ℝ² forces the enumeration path.
        let euclid = TargetSet::negative_orthant(2, Norm::L2).unwrap();
        let brute =
            PhiPsiOracle::new(ResponseFunction::Example1XStar, euclid, Parameterization::example1(), 2, 101).unwrap();
        let exact =
            PhiPsiOracle::new(ResponseFunction::Example1XStar, orthant(), Parameterization::example1(), 2, 101).unwrap();
        for k in 0..=10 {
            let nu = k as f64 / 10.0;
            // ℓ2 ≥ ℓ∞ pointwise, so the brute-force value dominates.
            assert!(brute.eval_param(&[nu]).unwrap() >= exact.eval_param(&[nu]).unwrap() - 1e-9);
        }
    }

    #[test]
    fn oracle_is_monotone_in_budget_and_refinement() {
        let param = Parameterization::example2();
        let q = [0.1, -0.3];
        let values: Vec<f64> = [(1, 11), (2, 11), (3, 11), (3, 21), (3, 41)]
            .iter()
            .map(|&(b, n)| {
                PhiPsiOracle::new(ResponseFunction::Example2XStar, zero(), param.clone(), b, n)
                    .unwrap()
                    .eval_param(&q)
                    .unwrap()
            })
            .collect();
        for w in values.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{values:?}");
        }
    }

    #[test]
    fn graph_distance_examples() {
        let param = Parameterization::example1();
        let phi = |m: &PayoffMatrix| phi_star(m, &orthant());
        let m = example1_matrix(1.0);
        let d = graph_distance(&m, &[3.0, 4.0], &phi, &orthant(), &param, 101).unwrap();
        assert!(d < 1e-9);
        let r = [4.0, 4.5];
        let g = graph_distance(&m, &r, &phi, &orthant(), &param, 101).unwrap();
        let direct = orthant().distance_to_expansion(&r, 4.0).unwrap();
        assert!(g <= direct + 1e-12);
    }

    #[test]
    fn unif_estimates() {
        let e1 = alpha_unif_estimate(&Parameterization::example1(), &orthant(), 101).unwrap();
        assert!((e1 - 4.0).abs() < 1e-9);
        let e2 = alpha_unif_estimate(&Parameterization::example2(), &zero(), 21).unwrap();
        assert!((e2 - 1.0).abs() < 1e-9);
        let whole = alpha_unif_estimate(&Parameterization::example1(), &TargetSet::whole(2).unwrap(), 11).unwrap();
        assert_eq!(whole, 0.0);
    }

    #[test]
    fn locate_inverts_point() {
        let p1 = Parameterization::example1();
        assert!((p1.locate(&p1.point(&[0.37]))[0] - 0.37).abs() < 1e-12);
        let p2 = Parameterization::example2();
        let back = p2.locate(&p2.point(&[0.25, -0.75]));
        assert!((back[0] - 0.25).abs() < 1e-12 && (back[1] + 0.75).abs() < 1e-12);
    }

    #[test]
    fn grid_csv_export() {
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &["nu", "value"], &[vec![0.5]], &[vec![2.5]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nu,value\n5.0000000000000000e-1,2.5"));
    }
}
