//! The projection-free strategy for a known opponent set `K`.
//!
//! Each round solves the zero-sum game `M[a][j] = ⟨δ, v_{j,a}⟩` over the
//! vertices `v_j` of `K`: the row player's optimal mixture is played and the
//! column player's optimal mixture gives the comparator matrix `m̃`. With a
//! response `Ψ_C` satisfying `Ψ_C(m)⊙m ∈ 𝒞`, the discrepancy
//! `δ = Σ x_s⊙m_s − Σ Ψ_C(m̃_s)⊙m̃_s` grows like `√T`.

use crate::blocks::Strategy;
use crate::error::{Error, Result};
use crate::geometry::{combine, dot, euclidean, ConvexBody, MixedAction, PayoffMatrix};
use crate::lp::{Cmp, Lp};
use crate::responses::ResponseFunction;

/// Optimal mixtures of a zero-sum game whose row player minimizes.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub row: MixedAction,
    pub column: MixedAction,
    /// `max_j (xᵀM)_j`: what the row mixture guarantees.
    pub upper: f64,
    /// `min_a (Mλ)_a`: what the column mixture guarantees.
    pub lower: f64,
}

impl GameSolution {
    pub fn value(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

const TIE_TOL: f64 = 1e-12;

/// Solves `min_x max_λ xᵀMλ` for `M` given as rows.
///
/// Games with one or two rows or columns are solved in closed form; larger
/// ones by a pair of linear programs. A constant matrix returns uniform play
/// for both players.
pub fn solve_matrix_game(matrix: &[Vec<f64>]) -> Result<GameSolution> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("empty game matrix".into()));
    }
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput("ragged game matrix".into()));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite game matrix entry".into()));
    }
    let first = matrix[0][0];
    let (row, column) = if matrix.iter().flatten().all(|&v| v == first) {
        (MixedAction::uniform(rows), MixedAction::uniform(cols))
    } else if rows <= 2 {
        (two_row_player(matrix), two_row_column_player(matrix))
    } else if cols <= 2 {
        let flipped = negated_transpose(matrix);
        (two_row_column_player(&flipped), two_row_player(&flipped))
    } else {
        (lp_row_player(matrix)?, lp_row_player(&negated_transpose(matrix))?)
    };
    Ok(finish(matrix, row, column))
}

fn finish(matrix: &[Vec<f64>], row: MixedAction, column: MixedAction) -> GameSolution {
    let cols = matrix[0].len();
    let upper = (0..cols)
        .map(|j| matrix.iter().zip(row.weights()).map(|(r, x)| x * r[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = matrix
        .iter()
        .map(|r| dot(r, column.weights()))
        .fold(f64::INFINITY, f64::min);
    GameSolution {
        row,
        column,
        upper,
        lower,
    }
}

fn negated_transpose(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = matrix[0].len();
    (0..cols).map(|j| matrix.iter().map(|r| -r[j]).collect()).collect()
}

/// Uniform over the indices whose score is within tolerance of the best.
fn uniform_over_best(scores: &[f64], maximize: bool) -> MixedAction {
    let best = if maximize {
        scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        scores.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let tol = TIE_TOL * best.abs().max(1.0);
    let hits: Vec<f64> = scores
        .iter()
        .map(|&s| if (s - best).abs() <= tol { 1.0 } else { 0.0 })
        .collect();
    MixedAction::new(hits).expect("at least one optimal index")
}

/// Row player of a game with at most two rows.
fn two_row_player(matrix: &[Vec<f64>]) -> MixedAction {
    if matrix.len() == 1 {
        return MixedAction::pure(1, 0);
    }
    let (top, bottom) = (&matrix[0], &matrix[1]);
    // Weight p on the first row: column j pays bottom_j + p (top_j − bottom_j).
    let worst = |p: f64| {
        top.iter()
            .zip(bottom)
            .map(|(t, b)| b + p * (t - b))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut candidates = vec![0.0, 0.5, 1.0];
    for j in 0..top.len() {
        for k in (j + 1)..top.len() {
            let slope = (top[j] - bottom[j]) - (top[k] - bottom[k]);
            if slope != 0.0 {
                let p = (bottom[k] - bottom[j]) / slope;
                if (0.0..=1.0).contains(&p) {
                    candidates.push(p);
                }
            }
        }
    }
    let p = pick(&candidates, worst, false);
    MixedAction::new(vec![p, 1.0 - p]).expect("p in [0, 1]")
}

/// Column player of a game with at most two rows.
fn two_row_column_player(matrix: &[Vec<f64>]) -> MixedAction {
    let cols = matrix[0].len();
    let guarantee = |w: &[f64]| matrix.iter().map(|r| dot(r, w)).fold(f64::INFINITY, f64::min);
    if matrix.len() == 1 {
        return uniform_over_best(&matrix[0], true);
    }
    let diff: Vec<f64> = (0..cols).map(|j| matrix[0][j] - matrix[1][j]).collect();
    let mut candidates: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut w = vec![0.0; cols];
            w[j] = 1.0;
            w
        })
        .collect();
    for j in 0..cols {
        for k in (j + 1)..cols {
            if diff[j] * diff[k] < 0.0 {
                let l = diff[k] / (diff[k] - diff[j]);
                let mut w = vec![0.0; cols];
                w[j] = l;
                w[k] = 1.0 - l;
                candidates.push(w);
            }
        }
    }
    let scores: Vec<f64> = candidates.iter().map(|w| guarantee(w)).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(1.0);
    // Average of all optimal candidates: still optimal by concavity.
    let mut mix = vec![0.0; cols];
    let mut count = 0.0;
    for (w, s) in candidates.iter().zip(&scores) {
        if best - s <= tol {
            mix.iter_mut().zip(w).for_each(|(m, v)| *m += v);
            count += 1.0;
        }
    }
    MixedAction::new(mix.into_iter().map(|v| v / count).collect()).expect("non-negative mixture")
}

/// The candidate optimizing `f`; ties go to the one closest to 1/2.
fn pick(candidates: &[f64], f: impl Fn(f64) -> f64, maximize: bool) -> f64 {
    let scores: Vec<f64> = candidates.iter().map(|&p| f(p)).collect();
    let sign = if maximize { -1.0 } else { 1.0 };
    let best = scores.iter().map(|s| sign * s).fold(f64::INFINITY, f64::min);
    let tol = TIE_TOL * best.abs().max(1.0);
    candidates
        .iter()
        .zip(&scores)
        .filter(|(_, s)| sign * **s - best <= tol)
        .map(|(&p, _)| p)
        .min_by(|a, b| (a - 0.5).abs().total_cmp(&(b - 0.5).abs()))
        .expect("non-empty candidates")
}

/// `min v` subject to `xᵀM ≤ v` on every column.
fn lp_row_player(matrix: &[Vec<f64>]) -> Result<MixedAction> {
    let cols = matrix[0].len();
    let mut lp = Lp::new();
    let x = lp.simplex(matrix.len());
    let v = lp.free();
    for j in 0..cols {
        let mut terms: Vec<(usize, f64)> = x.iter().zip(matrix).map(|(&xa, r)| (xa, r[j])).collect();
        terms.push((v, -1.0));
        lp.constrain(terms, Cmp::Le, 0.0);
    }
    lp.set_objective(&[(v, 1.0)]);
    let sol = lp.solve(false)?;
    let weights = x.iter().map(|&i| sol.values[i].max(0.0)).collect();
    MixedAction::new(weights)
}

/// State of the known-game strategy.
#[derive(Debug, Clone)]
pub struct BlackwellStrategy {
    body: ConvexBody,
    response: ResponseFunction,
    delta: Vec<f64>,
    played_sum: Vec<f64>,
    comparator_sum: Vec<f64>,
    rounds: usize,
    next: MixedAction,
    comparator_matrix: PayoffMatrix,
    last_game: GameSolution,
    tolerance: f64,
    max_excess: f64,
    max_value_gap: f64,
}

impl BlackwellStrategy {
    pub fn new(body: ConvexBody, response: ResponseFunction) -> Result<Self> {
        let d = body.d();
        let mut s = BlackwellStrategy {
            delta: vec![0.0; d],
            played_sum: vec![0.0; d],
            comparator_sum: vec![0.0; d],
            rounds: 0,
            next: MixedAction::uniform(body.actions()),
            comparator_matrix: body.vertices()[0].clone(),
            last_game: GameSolution {
                row: MixedAction::uniform(body.actions()),
                column: MixedAction::uniform(body.vertices().len()),
                upper: 0.0,
                lower: 0.0,
            },
            body,
            response,
            tolerance: 1e-6,
            max_excess: f64::NEG_INFINITY,
            max_value_gap: 0.0,
        };
        s.choose()?;
        Ok(s)
    }

    /// Tolerance of the per-round inequality check.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Solves the current game and stores `x_{t+1}` and `m̃_{t+1}`.
    fn choose(&mut self) -> Result<()> {
        let vertices = self.body.vertices();
        let per_vertex: Vec<Vec<f64>> = vertices.iter().map(|v| v.inner_with_columns(&self.delta)).collect();
        let matrix: Vec<Vec<f64>> = (0..self.body.actions())
            .map(|a| per_vertex.iter().map(|col| col[a]).collect())
            .collect();
        let game = solve_matrix_game(&matrix)?;
        let mut tilde = PayoffMatrix::zeros(self.body.d(), self.body.actions());
        for (v, &l) in vertices.iter().zip(game.column.weights()) {
            if l > 0.0 {
                tilde.add_scaled(v, l);
            }
        }
        self.max_value_gap = self.max_value_gap.max(game.gap());
        self.next = game.row.clone();
        self.comparator_matrix = tilde;
        self.last_game = game;
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn delta_norm(&self) -> f64 {
        euclidean(&self.delta)
    }

    pub fn played_sum(&self) -> &[f64] {
        &self.played_sum
    }

    pub fn comparator_sum(&self) -> &[f64] {
        &self.comparator_sum
    }

    /// `m̃` for the coming round.
    pub fn comparator_matrix(&self) -> &PayoffMatrix {
        &self.comparator_matrix
    }

    pub fn last_game(&self) -> &GameSolution {
        &self.last_game
    }

    /// Largest `⟨δ, x⊙m⟩ − ⟨δ, Ψ_C(m̃)⊙m̃⟩` seen so far.
    pub fn max_excess(&self) -> f64 {
        self.max_excess
    }

    /// Largest minmax − maxmin gap of the games solved so far.
    pub fn max_value_gap(&self) -> f64 {
        self.max_value_gap
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    /// One round against `m`; returns `x_t` that was played.
    pub fn step(&mut self, m: &PayoffMatrix) -> Result<MixedAction> {
        let x = self.next.clone();
        let played = combine(&x, m)?;
        let target_action = self.response.respond(&self.comparator_matrix)?;
        let comparator = combine(&target_action, &self.comparator_matrix)?;
        let lhs = dot(&self.delta, &played);
        let rhs = dot(&self.delta, &comparator);
        self.max_excess = self.max_excess.max(lhs - rhs);
        if lhs > rhs + self.tolerance {
            return Err(Error::InequalityViolation {
                lhs,
                rhs,
                tolerance: self.tolerance,
            });
        }
        for i in 0..self.delta.len() {
            self.delta[i] += played[i] - comparator[i];
            self.played_sum[i] += played[i];
            self.comparator_sum[i] += comparator[i];
        }
        self.rounds += 1;
        self.choose()?;
        Ok(x)
    }
}

impl Strategy for BlackwellStrategy {
    fn act(&mut self) -> MixedAction {
        self.next.clone()
    }

    fn observe(&mut self, m: &PayoffMatrix) -> Result<()> {
        self.step(m).map(|_| ())
    }

    fn name(&self) -> String {
        format!("blackwell[{}]", self.response.name())
    }

    fn discrepancy(&self) -> Option<&[f64]> {
        Some(&self.delta)
    }
}
