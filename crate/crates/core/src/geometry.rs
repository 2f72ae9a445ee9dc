//! Payoff matrices, mixed actions, norms and target sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Affine, Cmp, Lp};
use crate::qp::SquaredDistanceQp;

/// Tolerance used when checking that weights form a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// The opponent's move: `d` payoff coordinates for each of the `A` actions.
///
/// Stored column-major, so column `a` is the payoff vector `m_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    d: usize,
    actions: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    /// Builds a matrix from column-major entries.
    pub fn new(d: usize, actions: usize, entries: Vec<f64>) -> Result<Self> {
        if d == 0 || actions == 0 {
            return Err(Error::InvalidInput("payoff matrix needs d ≥ 1 and A ≥ 1".into()));
        }
        if entries.len() != d * actions {
            return Err(Error::DimensionMismatch {
                what: "payoff matrix entries",
                expected: d * actions,
                found: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("payoff matrix entries must be finite".into()));
        }
        Ok(PayoffMatrix { d, actions, entries })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let d = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != d) {
            return Err(Error::DimensionMismatch {
                what: "payoff column",
                expected: d,
                found: bad.len(),
            });
        }
        Self::new(d, columns.len(), columns.concat())
    }

    pub fn zeros(d: usize, actions: usize) -> Self {
        PayoffMatrix {
            d,
            actions,
            entries: vec![0.0; d * actions],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, a: usize) -> &[f64] {
        &self.entries[a * self.d..(a + 1) * self.d]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.d)
    }

    pub fn get(&self, i: usize, a: usize) -> f64 {
        self.entries[a * self.d + i]
    }

    /// Euclidean norm over all `d·A` entries.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &PayoffMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn same_shape(&self, other: &PayoffMatrix) -> bool {
        self.d == other.d && self.actions == other.actions
    }

    pub fn scaled(&self, c: f64) -> PayoffMatrix {
        PayoffMatrix {
            d: self.d,
            actions: self.actions,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &PayoffMatrix, c: f64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
    }

    /// `(1 − s)·self + s·other`.
    pub fn lerp(&self, other: &PayoffMatrix, s: f64) -> PayoffMatrix {
        PayoffMatrix {
            d: self.d,
            actions: self.actions,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (1.0 - s) * a + s * b)
                .collect(),
        }
    }

    /// The `A`-vector `(⟨v, m_a⟩)_a`.
    pub fn inner_with_columns(&self, v: &[f64]) -> Vec<f64> {
        self.columns().map(|c| dot(c, v)).collect()
    }

    /// Keeps only the listed payoff rows.
    pub fn select_rows(&self, rows: &[usize]) -> PayoffMatrix {
        let entries = self
            .columns()
            .flat_map(|c| rows.iter().map(move |&i| c[i]))
            .collect();
        PayoffMatrix {
            d: rows.len(),
            actions: self.actions,
            entries,
        }
    }
}

/// A probability vector over the decision-maker's actions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedAction {
    weights: Vec<f64>,
}

impl MixedAction {
    /// Validates and renormalizes `weights`. Entries down to `-1e-12` are
    /// treated as rounding noise and clipped to zero.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("mixed action needs at least one action".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -SIMPLEX_TOL) {
            return Err(Error::InvalidInput(format!(
                "mixed action weights must be finite and non-negative: {weights:?}"
            )));
        }
        let clipped: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("mixed action weights sum to zero".into()));
        }
        Ok(MixedAction {
            weights: clipped.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(actions: usize) -> Self {
        MixedAction {
            weights: vec![1.0 / actions as f64; actions],
        }
    }

    pub fn pure(actions: usize, a: usize) -> Self {
        let mut weights = vec![0.0; actions];
        weights[a] = 1.0;
        MixedAction { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn max_abs_diff(&self, other: &MixedAction) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `x ⊙ m = Σ_a x_a m_a`.
pub fn combine(x: &MixedAction, m: &PayoffMatrix) -> Result<Vec<f64>> {
    if x.len() != m.actions() {
        return Err(Error::DimensionMismatch {
            what: "mixed action vs payoff columns",
            expected: m.actions(),
            found: x.len(),
        });
    }
    Ok(combine_weights(x.weights(), m))
}

pub(crate) fn combine_weights(x: &[f64], m: &PayoffMatrix) -> Vec<f64> {
    let mut r = vec![0.0; m.d()];
    for (w, col) in x.iter().zip(m.columns()) {
        for (ri, ci) in r.iter_mut().zip(col) {
            *ri += w * ci;
        }
    }
    r
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_to_simplex(v: &[f64]) -> Result<MixedAction> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("projection needs a finite, non-empty vector".into()));
    }
    Ok(MixedAction {
        weights: project_onto_simplex(v),
    })
}

pub(crate) fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|x| *x /= total);
    }
    out
}

/// The `ℓp` norm used for set distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => euclidean(v),
            Norm::LInf => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(Norm::L1),
            "2" | "l2" => Ok(Norm::L2),
            "inf" | "infinity" | "linf" => Ok(Norm::LInf),
            other => Err(Error::InvalidInput(format!(
                "unsupported norm `{other}` (expected 1, 2 or inf)"
            ))),
        }
    }
}

impl TryFrom<String> for Norm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Norm> for String {
    fn from(n: Norm) -> String {
        n.to_string()
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::LInf => "inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetShape {
    NegativeOrthant { dim: usize },
    Singleton(Vec<f64>),
    /// `(−∞, θ]` in dimension one.
    HalfLineBelow(f64),
    /// `[θ, ∞)` in dimension one.
    HalfLineAbove(f64),
    Polytope(Vec<Vec<f64>>),
    /// The whole space, so every distance is zero.
    Whole { dim: usize },
}

/// A closed convex set together with the norm of its expansions.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    shape: SetShape,
    norm: Norm,
}

/// Affine function `r ↦ ⟨slope, r⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub offset: f64,
}

impl AffinePiece {
    pub fn eval(&self, r: &[f64]) -> f64 {
        dot(&self.slope, r) + self.offset
    }
}

const POLYTOPE_TOL: f64 = 1e-9;
const POLYTOPE_MAX_ITER: usize = 10_000;

impl TargetSet {
    pub fn negative_orthant(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("orthant dimension must be ≥ 1".into()));
        }
        Ok(TargetSet {
            shape: SetShape::NegativeOrthant { dim },
            norm,
        })
    }

    pub fn singleton(point: Vec<f64>, norm: Norm) -> Result<Self> {
        if point.is_empty() || point.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("singleton needs a finite, non-empty point".into()));
        }
        Ok(TargetSet {
            shape: SetShape::Singleton(point),
            norm,
        })
    }

    pub fn half_line_below(threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidInput("half-line threshold must be finite".into()));
        }
        Ok(TargetSet {
            shape: SetShape::HalfLineBelow(threshold),
            norm: Norm::LInf,
        })
    }

    pub fn half_line_above(threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidInput("half-line threshold must be finite".into()));
        }
        Ok(TargetSet {
            shape: SetShape::HalfLineAbove(threshold),
            norm: Norm::LInf,
        })
    }

    pub fn polytope(vertices: Vec<Vec<f64>>, norm: Norm) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidInput("polytope needs at least one non-empty vertex".into()));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "polytope vertex",
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("polytope vertices must be finite".into()));
            }
        }
        Ok(TargetSet {
            shape: SetShape::Polytope(vertices),
            norm,
        })
    }

    pub fn whole(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be ≥ 1".into()));
        }
        Ok(TargetSet {
            shape: SetShape::Whole { dim },
            norm: Norm::L2,
        })
    }

    pub fn shape(&self) -> &SetShape {
        &self.shape
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Same set, different norm (half-lines and the whole space ignore it).
    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            SetShape::NegativeOrthant { dim } | SetShape::Whole { dim } => *dim,
            SetShape::Singleton(c) => c.len(),
            SetShape::HalfLineBelow(_) | SetShape::HalfLineAbove(_) => 1,
            SetShape::Polytope(v) => v[0].len(),
        }
    }

    fn check_dim(&self, r: &[f64]) -> Result<()> {
        if r.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "point vs target set",
                expected: self.dim(),
                found: r.len(),
            });
        }
        Ok(())
    }

    /// `d_p(r, C)`.
    pub fn distance(&self, r: &[f64]) -> Result<f64> {
        self.check_dim(r)?;
        let d = match &self.shape {
            SetShape::Whole { .. } => 0.0,
            SetShape::NegativeOrthant { .. } => {
                let excess: Vec<f64> = r.iter().map(|x| x.max(0.0)).collect();
                self.norm.of(&excess)
            }
            SetShape::Singleton(c) => {
                let diff: Vec<f64> = r.iter().zip(c).map(|(a, b)| a - b).collect();
                self.norm.of(&diff)
            }
            SetShape::HalfLineBelow(theta) => (r[0] - theta).max(0.0),
            SetShape::HalfLineAbove(theta) => (theta - r[0]).max(0.0),
            SetShape::Polytope(vertices) => self.polytope_distance(vertices, r)?,
        };
        Ok(d)
    }

    fn polytope_distance(&self, vertices: &[Vec<f64>], r: &[f64]) -> Result<f64> {
        if r.len() == 1 {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            return Ok((lo - r[0]).max(r[0] - hi).max(0.0));
        }
        match self.norm {
            Norm::L2 => {
                let blocks = [0..vertices.len()];
                let origin = |y: &[f64]| vec![0.0; y.len()];
                let qp = SquaredDistanceQp {
                    columns: vertices,
                    blocks: &blocks,
                    offset: r,
                    project: &origin,
                };
                let start = vec![1.0 / vertices.len() as f64; vertices.len()];
                let out = qp.solve(start, POLYTOPE_TOL * POLYTOPE_TOL, POLYTOPE_MAX_ITER);
                Ok((2.0 * out.value).sqrt())
            }
            _ => {
                let mut lp = Lp::new();
                let point: Vec<Affine> = r.iter().map(|&c| Affine::constant(c)).collect();
                let objective = lp::add_distance(&mut lp, &point, self)?;
                lp.set_objective(&objective);
                Ok(lp.solve(false)?.objective.max(0.0))
            }
        }
    }

    /// `d_p(r, C_α) = max(0, d_p(r, C) − α)`.
    pub fn distance_to_expansion(&self, r: &[f64], alpha: f64) -> Result<f64> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::NegativeExpansion(alpha));
        }
        Ok((self.distance(r)? - alpha).max(0.0))
    }

    pub fn contains(&self, r: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance(r)? <= tol)
    }

    /// Euclidean projection, available for the shapes with a closed form.
    pub(crate) fn euclidean_projection(&self, r: &[f64]) -> Option<Vec<f64>> {
        match &self.shape {
            SetShape::Whole { .. } => Some(r.to_vec()),
            SetShape::NegativeOrthant { .. } => Some(r.iter().map(|x| x.min(0.0)).collect()),
            SetShape::Singleton(c) => Some(c.clone()),
            SetShape::HalfLineBelow(t) => Some(vec![r[0].min(*t)]),
            SetShape::HalfLineAbove(t) => Some(vec![r[0].max(*t)]),
            SetShape::Polytope(_) => None,
        }
    }

    /// Writes `d_p(·, C)` as a maximum of affine functions when that is
    /// cheap to enumerate; `None` otherwise.
    pub fn affine_pieces(&self) -> Option<Vec<AffinePiece>> {
        let dim = self.dim();
        let unit = |i: usize, s: f64| {
            let mut v = vec![0.0; dim];
            v[i] = s;
            v
        };
        let zero = AffinePiece {
            slope: vec![0.0; dim],
            offset: 0.0,
        };
        let norm = if dim == 1 { Norm::LInf } else { self.norm };
        let pieces = match (&self.shape, norm) {
            (SetShape::Whole { .. }, _) => vec![zero],
            (SetShape::HalfLineBelow(t), _) => vec![
                zero,
                AffinePiece {
                    slope: vec![1.0],
                    offset: -t,
                },
            ],
            (SetShape::HalfLineAbove(t), _) => vec![
                zero,
                AffinePiece {
                    slope: vec![-1.0],
                    offset: *t,
                },
            ],
            (SetShape::NegativeOrthant { .. }, Norm::LInf) => {
                let mut p = vec![zero];
                p.extend((0..dim).map(|i| AffinePiece {
                    slope: unit(i, 1.0),
                    offset: 0.0,
                }));
                p
            }
            (SetShape::NegativeOrthant { .. }, Norm::L1) if dim <= 12 => (0..1usize << dim)
                .map(|mask| AffinePiece {
                    slope: (0..dim).map(|i| ((mask >> i) & 1) as f64).collect(),
                    offset: 0.0,
                })
                .collect(),
            (SetShape::Singleton(c), Norm::LInf) => (0..dim)
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| AffinePiece {
                        slope: unit(i, s),
                        offset: -s * c[i],
                    })
                })
                .collect(),
            (SetShape::Singleton(c), Norm::L1) if dim <= 12 => (0..1usize << dim)
                .map(|mask| {
                    let slope: Vec<f64> = (0..dim)
                        .map(|i| if (mask >> i) & 1 == 1 { 1.0 } else { -1.0 })
                        .collect();
                    let offset = -dot(&slope, c);
                    AffinePiece { slope, offset }
                })
                .collect(),
            (SetShape::Polytope(v), _) if dim == 1 => {
                let lo = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                vec![
                    zero,
                    AffinePiece {
                        slope: vec![1.0],
                        offset: -hi,
                    },
                    AffinePiece {
                        slope: vec![-1.0],
                        offset: lo,
                    },
                ]
            }
            _ => return None,
        };
        Some(pieces)
    }
}

/// `d_p(r, C_α)`.
pub fn distance_to_expansion(r: &[f64], set: &TargetSet, alpha: f64) -> Result<f64> {
    set.distance_to_expansion(r, alpha)
}

/// A polytope of payoff matrices, given by its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    vertices: Vec<PayoffMatrix>,
}

impl ConvexBody {
    pub fn new(vertices: Vec<PayoffMatrix>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::InvalidInput("convex body needs at least one vertex".into()))?;
        if let Some(bad) = vertices.iter().find(|v| !v.same_shape(first)) {
            return Err(Error::DimensionMismatch {
                what: "convex body vertex entries",
                expected: first.entries().len(),
                found: bad.entries().len(),
            });
        }
        Ok(ConvexBody { vertices })
    }

    pub fn vertices(&self) -> &[PayoffMatrix] {
        &self.vertices
    }

    pub fn d(&self) -> usize {
        self.vertices[0].d()
    }

    pub fn actions(&self) -> usize {
        self.vertices[0].actions()
    }

    /// `K_max`: the larger of the biggest vertex norm and the diameter.
    pub fn norm_bound(&self) -> f64 {
        let mut best = self.vertices.iter().map(PayoffMatrix::norm).fold(0.0, f64::max);
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.distance(b));
            }
        }
        best
    }

    /// `ℓ1` distance from `m` to the body, via a linear program.
    pub fn l1_distance(&self, m: &PayoffMatrix) -> Result<f64> {
        if !m.same_shape(&self.vertices[0]) {
            return Err(Error::DimensionMismatch {
                what: "payoff matrix vs convex body",
                expected: self.vertices[0].entries().len(),
                found: m.entries().len(),
            });
        }
        if self.vertices.len() == 1 {
            return Ok(m
                .entries()
                .iter()
                .zip(self.vertices[0].entries())
                .map(|(a, b)| (a - b).abs())
                .sum());
        }
        let mut lp = Lp::new();
        let mu = lp.simplex(self.vertices.len());
        let mut objective = Vec::new();
        for (k, &target) in m.entries().iter().enumerate() {
            let s = lp.nonneg();
            let mut terms: Vec<(usize, f64)> = mu
                .iter()
                .zip(&self.vertices)
                .map(|(&j, v)| (j, v.entries()[k]))
                .collect();
            terms.push((s, -1.0));
            lp.constrain(terms.clone(), Cmp::Le, target);
            terms.last_mut().unwrap().1 = 1.0;
            lp.constrain(terms, Cmp::Ge, target);
            objective.push((s, 1.0));
        }
        lp.set_objective(&objective);
        Ok(lp.solve(false)?.objective.max(0.0))
    }

    pub fn contains(&self, m: &PayoffMatrix, tol: f64) -> Result<bool> {
        Ok(self.l1_distance(m)? <= tol)
    }
}

/// `K_max` of a body.
pub fn body_norm_bound(body: &ConvexBody) -> f64 {
    body.norm_bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m_dagger() -> PayoffMatrix {
        PayoffMatrix::from_columns(&[vec![3.0, 4.0], vec![0.0, 5.0]]).unwrap()
    }

    fn m_sharp() -> PayoffMatrix {
        PayoffMatrix::from_columns(&[vec![4.0, 3.0], vec![5.0, 0.0]]).unwrap()
    }

    #[test]
    fn combine_examples() {
        let m = m_dagger();
        assert_eq!(combine(&MixedAction::pure(2, 0), &m).unwrap(), vec![3.0, 4.0]);
        let half = combine(&MixedAction::uniform(2), &m).unwrap();
        assert_eq!(half, vec![1.5, 4.5]);
        let same = PayoffMatrix::from_columns(&vec![vec![1.0, -2.0]; 3]).unwrap();
        let r = combine(&MixedAction::uniform(3), &same).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] + 2.0).abs() < 1e-15);
        assert!(matches!(
            combine(&MixedAction::uniform(3), &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expansion_distance_examples() {
        let inf = TargetSet::negative_orthant(2, Norm::LInf).unwrap();
        assert_eq!(inf.distance_to_expansion(&[3.0, 4.0], 0.0).unwrap(), 4.0);
        assert_eq!(inf.distance_to_expansion(&[3.0, 4.0], 4.0).unwrap(), 0.0);
        let two = TargetSet::negative_orthant(2, Norm::L2).unwrap();
        assert!((two.distance_to_expansion(&[3.0, 4.0], 0.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(matches!(
            inf.distance_to_expansion(&[0.0, 0.0], -1.0),
            Err(Error::NegativeExpansion(_))
        ));
        let below = TargetSet::half_line_below(0.5).unwrap();
        assert_eq!(below.distance_to_expansion(&[2.0], 0.5).unwrap(), 1.0);
        let point = TargetSet::singleton(vec![1.0, 1.0], Norm::L1).unwrap();
        assert_eq!(point.distance_to_expansion(&[0.0, 3.0], 1.0).unwrap(), 2.0);
    }

    #[test]
    fn polytope_distance_matches_brute_force() {
        // Unit square; point (2, 3): ℓ2 distance √5, ℓ∞ distance 2, ℓ1 distance 3.
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let p2 = TargetSet::polytope(square.clone(), Norm::L2).unwrap();
        assert!((p2.distance(&[2.0, 3.0]).unwrap() - 5f64.sqrt()).abs() < 1e-8);
        let pinf = TargetSet::polytope(square.clone(), Norm::LInf).unwrap();
        assert!((pinf.distance(&[2.0, 3.0]).unwrap() - 2.0).abs() < 1e-9);
        let p1 = TargetSet::polytope(square, Norm::L1).unwrap();
        assert!((p1.distance(&[2.0, 3.0]).unwrap() - 3.0).abs() < 1e-9);
        assert!(p2.distance(&[0.5, 0.5]).unwrap() < 1e-6);
    }

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_to_simplex(&[0.5, 0.5]).unwrap().weights(), &[0.5, 0.5]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]).unwrap().weights(), &[1.0, 0.0]);
        let p = project_to_simplex(&[0.8, 0.6, 0.6]).unwrap();
        let expected = [0.4 + 0.2 / 3.0, 0.2 + 0.2 / 3.0, 0.2 + 0.2 / 3.0];
        for (a, b) in p.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!((p.weights()[0] - 0.4667).abs() < 1e-4);
    }

    #[test]
    fn norm_bound_examples() {
        let segment = ConvexBody::new(vec![m_dagger(), m_sharp()]).unwrap();
        assert!((segment.norm_bound() - 52f64.sqrt()).abs() < 1e-12);
        let origin = ConvexBody::new(vec![PayoffMatrix::zeros(1, 2)]).unwrap();
        assert_eq!(origin.norm_bound(), 0.0);
        let square: Vec<PayoffMatrix> = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
            .iter()
            .map(|&(v, w)| PayoffMatrix::new(1, 2, vec![v, w]).unwrap())
            .collect();
        let square = ConvexBody::new(square).unwrap();
        assert!((square.norm_bound() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn body_membership() {
        let segment = ConvexBody::new(vec![m_dagger(), m_sharp()]).unwrap();
        assert!(segment.contains(&m_dagger().lerp(&m_sharp(), 0.3), 1e-9).unwrap());
        assert!(!segment.contains(&PayoffMatrix::zeros(2, 2), 1e-9).unwrap());
    }

    #[test]
    fn mixed_action_validation() {
        assert!(MixedAction::new(vec![1.0, -0.1]).is_err());
        assert!(MixedAction::new(vec![0.0, 0.0]).is_err());
        assert!(MixedAction::new(vec![f64::NAN]).is_err());
        let x = MixedAction::new(vec![2.0, 2.0]).unwrap();
        assert_eq!(x.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn pieces_agree_with_distance() {
        let sets = [
            TargetSet::negative_orthant(3, Norm::LInf).unwrap(),
            TargetSet::negative_orthant(3, Norm::L1).unwrap(),
            TargetSet::singleton(vec![0.5, -1.0], Norm::LInf).unwrap(),
            TargetSet::singleton(vec![0.5, -1.0], Norm::L1).unwrap(),
            TargetSet::singleton(vec![0.0], Norm::L2).unwrap(),
            TargetSet::half_line_above(1.0).unwrap(),
            TargetSet::whole(2).unwrap(),
        ];
        let points = [vec![0.3, -2.0, 1.5], vec![-1.0, 4.0, 0.2], vec![0.0, 0.0, 0.0]];
        for set in &sets {
            let pieces = set.affine_pieces().unwrap();
            for p in &points {
                let r = &p[..set.dim()];
                let max = pieces.iter().map(|a| a.eval(r)).fold(f64::NEG_INFINITY, f64::max);
                assert!((max - set.distance(r).unwrap()).abs() < 1e-12, "{set:?} at {r:?}");
            }
        }
    }

    fn any_norm() -> impl Strategy<Value = Norm> {
        prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::LInf)]
    }

    proptest! {
        #[test]
        fn expansion_is_monotone_and_lipschitz(
            r in prop::collection::vec(-5.0..5.0f64, 2),
            s in prop::collection::vec(-5.0..5.0f64, 2),
            a in 0.0..3.0f64,
            b in 0.0..3.0f64,
            norm in any_norm(),
        ) {
            let sets = [
                TargetSet::negative_orthant(2, norm).unwrap(),
                TargetSet::singleton(vec![1.0, -1.0], norm).unwrap(),
                TargetSet::polytope(vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 0.0]], norm).unwrap(),
            ];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let diff: Vec<f64> = r.iter().zip(&s).map(|(x, y)| x - y).collect();
            for set in &sets {
                let d_lo = set.distance_to_expansion(&r, lo).unwrap();
                let d_hi = set.distance_to_expansion(&r, hi).unwrap();
                prop_assert!(d_hi <= d_lo + 1e-12);
                let d_s = set.distance_to_expansion(&s, lo).unwrap();
                prop_assert!((d_lo - d_s).abs() <= norm.of(&diff) + 1e-6);
            }
        }

        #[test]
        fn members_have_zero_distance(
            w in prop::collection::vec(0.01..1.0f64, 3),
            norm in any_norm(),
        ) {
            let vertices = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![2.0, 0.0]];
            let x = MixedAction::new(w).unwrap();
            let point: Vec<f64> = (0..2)
                .map(|i| vertices.iter().zip(x.weights()).map(|(v, wj)| wj * v[i]).sum())
                .collect();
            let set = TargetSet::polytope(vertices, norm).unwrap();
            prop_assert!(set.distance(&point).unwrap() <= 1e-6);
            let orthant = TargetSet::negative_orthant(2, norm).unwrap();
            let inside: Vec<f64> = point.iter().map(|c| -c).collect();
            prop_assert_eq!(orthant.distance(&inside).unwrap(), 0.0);
        }

        #[test]
        fn combine_is_bilinear(
            w1 in prop::collection::vec(0.0..1.0f64, 3),
            w2 in prop::collection::vec(0.0..1.0f64, 3),
            lambda in 0.0..1.0f64,
            entries in prop::collection::vec(-10.0..10.0f64, 6),
        ) {
            prop_assume!(w1.iter().sum::<f64>() > 1e-3 && w2.iter().sum::<f64>() > 1e-3);
            let m = PayoffMatrix::new(2, 3, entries).unwrap();
            let x = MixedAction::new(w1).unwrap();
            let y = MixedAction::new(w2).unwrap();
            let mix: Vec<f64> = x.weights().iter().zip(y.weights())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            let lhs = combine(&MixedAction::new(mix).unwrap(), &m).unwrap();
            let rx = combine(&x, &m).unwrap();
            let ry = combine(&y, &m).unwrap();
            for i in 0..2 {
                prop_assert!((lhs[i] - (lambda * rx[i] + (1.0 - lambda) * ry[i])).abs() < 1e-9);
            }
        }

        #[test]
        fn projection_beats_grid(v in prop::collection::vec(-2.0..2.0f64, 3)) {
            let p = project_to_simplex(&v).unwrap();
            let w = p.weights();
            prop_assert!(w.iter().all(|x| *x >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < SIMPLEX_TOL);
            let dist = |x: &[f64]| x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let best = dist(w);
            let n = 50;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let g = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                    prop_assert!(best <= dist(&g) + 1e-12);
                }
            }
            let again = project_to_simplex(w).unwrap();
            prop_assert!(again.max_abs_diff(&p) < 1e-12);
        }
    }
}
