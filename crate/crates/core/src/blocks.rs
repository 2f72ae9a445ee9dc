//! The block strategy: blocks of lengths 1, 2, 3, …, each driven by a fresh
//! regret minimizer fed the payoffs scalarized by the current discrepancy.
//!
//! Block `n` covers rounds `n(n−1)/2 + 1 ..= n(n+1)/2`. At its start the
//! discrepancy is
//! `δ_n = Σ_{t ≤ n(n−1)/2} x_t⊙m_t − Σ_{k<n} k Ψ(m̄^(k))⊙m̄^(k)`,
//! and action `a` receives the scalar payoff `−⟨δ_n, m_{t,a}⟩`.
//! The strategy never looks at the opponent's set `K`.

use crate::error::{Error, Result};
use crate::geometry::{combine, euclidean, MixedAction, PayoffMatrix};
use crate::regret::PolynomialWeights;
use crate::responses::ResponseFunction;

/// Something that plays mixed actions against a sequence of payoff matrices.
pub trait Strategy {
    fn act(&mut self) -> MixedAction;

    fn observe(&mut self, m: &PayoffMatrix) -> Result<()>;

    fn name(&self) -> String;

    /// Current discrepancy vector, when the strategy keeps one.
    fn discrepancy(&self) -> Option<&[f64]> {
        None
    }
}

/// Block index `n` of round `t ≥ 1`: the `n` with `n(n−1)/2 < t ≤ n(n+1)/2`.
pub fn block_of_round(t: usize) -> usize {
    let mut n = ((2.0 * t as f64).sqrt()).floor() as usize;
    while n * (n + 1) / 2 < t {
        n += 1;
    }
    while n > 1 && (n - 1) * n / 2 >= t {
        n -= 1;
    }
    n.max(1)
}

/// Largest `N` with `N(N+1)/2 ≤ t`.
pub fn completed_blocks(t: usize) -> usize {
    let mut n = ((2.0 * t as f64).sqrt()).floor() as usize;
    while n * (n + 1) / 2 > t {
        n -= 1;
    }
    while (n + 1) * (n + 2) / 2 <= t {
        n += 1;
    }
    n
}

/// Summary of one completed block.
#[derive(Debug, Clone)]
pub struct BlockRecord {
    pub len: usize,
    /// `m̄^(k)`.
    pub mean: PayoffMatrix,
    /// `Ψ(m̄^(k))`.
    pub response: MixedAction,
    /// `Ψ(m̄^(k)) ⊙ m̄^(k)`.
    pub comparator: Vec<f64>,
    /// `Σ x_t⊙m_t` over the block.
    pub played: Vec<f64>,
    /// `‖δ_{k+1}‖₂` right after the block closed.
    pub delta_norm_after: f64,
}

/// Quantities of the pathwise performance guarantee at round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub t: usize,
    /// Largest `N` with `N(N+1)/2 ≤ t`.
    pub n: usize,
    pub comparator: Vec<f64>,
    /// `‖(1/t) Σ x_s⊙m_s − c_t‖₂`.
    pub gap: f64,
    /// `8 K_max √(ln A) t^{−1/4} + √2 K_max t^{−1/2}`.
    pub bound: f64,
}

/// `8 K_max √(ln A) t^{−1/4} + √2 K_max t^{−1/2}`.
pub fn certificate_bound(k_max: f64, actions: usize, t: usize) -> f64 {
    let t = t as f64;
    8.0 * k_max * (actions as f64).ln().sqrt() * t.powf(-0.25) + 2f64.sqrt() * k_max / t.sqrt()
}

/// `2 K_max √(2 n³ ln A)`, the bound on `‖δ_{n+1}‖₂`.
pub fn discrepancy_bound(k_max: f64, actions: usize, n: usize) -> f64 {
    2.0 * k_max * (2.0 * (n as f64).powi(3) * (actions as f64).ln()).sqrt()
}

#[derive(Debug, Clone)]
struct RoundEntry {
    played: Vec<f64>,
    m: PayoffMatrix,
}

#[derive(Debug, Clone)]
pub struct BlockStrategy {
    d: usize,
    actions: usize,
    response: ResponseFunction,
    block: usize,
    position: usize,
    rounds: usize,
    delta: Vec<f64>,
    played_sum: Vec<f64>,
    comparator_sum: Vec<f64>,
    block_m_sum: PayoffMatrix,
    block_played: Vec<f64>,
    history: Vec<BlockRecord>,
    forecaster: PolynomialWeights,
    psi_calls: usize,
    log: Option<Vec<RoundEntry>>,
}

impl BlockStrategy {
    pub fn new(d: usize, actions: usize, response: ResponseFunction) -> Self {
        BlockStrategy {
            d,
            actions,
            response,
            block: 1,
            position: 0,
            rounds: 0,
            delta: vec![0.0; d],
            played_sum: vec![0.0; d],
            comparator_sum: vec![0.0; d],
            block_m_sum: PayoffMatrix::zeros(d, actions),
            block_played: vec![0.0; d],
            history: Vec::new(),
            forecaster: PolynomialWeights::new(actions),
            psi_calls: 0,
            log: None,
        }
    }

    /// Keeps every round so certificates can be computed for past rounds.
    pub fn with_round_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Index of the block the next round belongs to.
    pub fn block(&self) -> usize {
        self.block
    }

    /// `δ_n` of the current block.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn played_sum(&self) -> &[f64] {
        &self.played_sum
    }

    pub fn history(&self) -> &[BlockRecord] {
        &self.history
    }

    /// Calls made to `Ψ` by play (certificates are not counted).
    pub fn psi_calls(&self) -> usize {
        self.psi_calls
    }

    pub fn response(&self) -> &ResponseFunction {
        &self.response
    }

    fn check_shape(&self, m: &PayoffMatrix) -> Result<()> {
        if m.d() != self.d || m.actions() != self.actions {
            return Err(Error::DimensionMismatch {
                what: "payoff matrix entries",
                expected: self.d * self.actions,
                found: m.d() * m.actions(),
            });
        }
        Ok(())
    }

    /// Recomputes `δ_n` from the stored block summaries.
    pub fn audit_delta(&self) -> Vec<f64> {
        let mut delta = vec![0.0; self.d];
        for b in &self.history {
            for i in 0..self.d {
                delta[i] += b.played[i] - b.len as f64 * b.comparator[i];
            }
        }
        delta
    }

    /// Largest coordinate gap between the running `δ_n` and its recomputation.
    pub fn audit(&self) -> f64 {
        self.audit_delta()
            .iter()
            .zip(&self.delta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// The certificate at round `t` (`1 ≤ t ≤ rounds`). Past rounds need the
    /// round log; `t = rounds` always works.
    pub fn certificate(&self, t: usize, k_max: f64) -> Result<Certificate> {
        if t == 0 {
            return Err(Error::InvalidInput("certificate needs t ≥ 1".into()));
        }
        if t > self.rounds {
            return Err(Error::RoundUnavailable {
                requested: t,
                played: self.rounds,
                detail: "",
            });
        }
        let n = completed_blocks(t);
        let start = n * (n - 1) / 2;
        let part_len = t - start;
        let (played, part_sum) = if t == self.rounds {
            let mut part = self.block_m_sum.clone();
            let last = &self.history[n - 1];
            part.add_scaled(&last.mean, last.len as f64);
            (self.played_sum.clone(), part)
        } else {
            let log = self.log.as_ref().ok_or(Error::RoundUnavailable {
                requested: t,
                played: self.rounds,
                detail: ", round log disabled",
            })?;
            let mut played = vec![0.0; self.d];
            for entry in &log[..t] {
                for (p, e) in played.iter_mut().zip(&entry.played) {
                    *p += e;
                }
            }
            let mut part = PayoffMatrix::zeros(self.d, self.actions);
            for entry in &log[start..t] {
                part.add_scaled(&entry.m, 1.0);
            }
            (played, part)
        };
        let part_mean = part_sum.scaled(1.0 / part_len as f64);
        let psi = self.response.respond(&part_mean)?;
        let part_comp = combine(&psi, &part_mean)?;
        let mut comparator = vec![0.0; self.d];
        for b in &self.history[..n - 1] {
            for i in 0..self.d {
                comparator[i] += b.len as f64 * b.comparator[i];
            }
        }
        let tf = t as f64;
        for i in 0..self.d {
            comparator[i] = (comparator[i] + part_len as f64 * part_comp[i]) / tf;
        }
        let diff: Vec<f64> = played.iter().zip(&comparator).map(|(p, c)| p / tf - c).collect();
        Ok(Certificate {
            t,
            n,
            comparator,
            gap: euclidean(&diff),
            bound: certificate_bound(k_max, self.actions, t),
        })
    }

    fn close_block(&mut self) -> Result<()> {
        let len = self.block;
        let mean = self.block_m_sum.scaled(1.0 / len as f64);
        let response = self.response.respond(&mean)?;
        self.psi_calls += 1;
        let comparator = combine(&response, &mean)?;
        for i in 0..self.d {
            self.comparator_sum[i] += len as f64 * comparator[i];
            self.delta[i] = self.played_sum[i] - self.comparator_sum[i];
        }
        self.history.push(BlockRecord {
            len,
            mean,
            response,
            comparator,
            played: std::mem::replace(&mut self.block_played, vec![0.0; self.d]),
            delta_norm_after: euclidean(&self.delta),
        });
        self.block += 1;
        self.position = 0;
        self.block_m_sum = PayoffMatrix::zeros(self.d, self.actions);
        self.forecaster = PolynomialWeights::new(self.actions);
        Ok(())
    }
}

impl Strategy for BlockStrategy {
    fn act(&mut self) -> MixedAction {
        self.forecaster.next_action().clone()
    }

    fn observe(&mut self, m: &PayoffMatrix) -> Result<()> {
        self.check_shape(m)?;
        let x = self.forecaster.next_action().clone();
        let r = combine(&x, m)?;
        let scalarized: Vec<f64> = m.inner_with_columns(&self.delta).into_iter().map(|v| -v).collect();
        self.forecaster.observe(&scalarized)?;
        for i in 0..self.d {
            self.played_sum[i] += r[i];
            self.block_played[i] += r[i];
        }
        self.block_m_sum.add_scaled(m, 1.0);
        if let Some(log) = self.log.as_mut() {
            log.push(RoundEntry {
                played: r,
                m: m.clone(),
            });
        }
        self.rounds += 1;
        self.position += 1;
        if self.position == self.block {
            self.close_block()?;
        }
        Ok(())
    }

    fn name(&self) -> String {
        format!("blocks[{}]", self.response.name())
    }

    fn discrepancy(&self) -> Option<&[f64]> {
        Some(&self.delta)
    }
}

/// Plays the same mixed action every round.
#[derive(Debug, Clone)]
pub struct ConstantPlay {
    action: MixedAction,
}

impl ConstantPlay {
    pub fn new(action: MixedAction) -> Self {
        ConstantPlay { action }
    }
}

impl Strategy for ConstantPlay {
    fn act(&mut self) -> MixedAction {
        self.action.clone()
    }

    fn observe(&mut self, m: &PayoffMatrix) -> Result<()> {
        if m.actions() != self.action.len() {
            return Err(Error::DimensionMismatch {
                what: "payoff columns vs constant action",
                expected: self.action.len(),
                found: m.actions(),
            });
        }
        Ok(())
    }

    fn name(&self) -> String {
        format!("constant{:?}", self.action.weights())
    }
}

/// Iterates `u_1 = γ₂`, `u_{n+1} = u_n + 2γ₁√((n+1)u_n) + γ₂(n+1)²` and
/// returns the first `n ≤ n_max` with `u_n > max{2γ₁², γ₂}·n³`, if any.
pub fn recurrence_violation(gamma1: f64, gamma2: f64, n_max: usize) -> Option<(usize, f64, f64)> {
    let c = (2.0 * gamma1 * gamma1).max(gamma2);
    let mut u = gamma2;
    for n in 1..=n_max {
        let cap = c * (n as f64).powi(3);
        if u > cap * (1.0 + 1e-12) {
            return Some((n, u, cap));
        }
        let next = (n + 1) as f64;
        u += 2.0 * gamma1 * (next * u).sqrt() + gamma2 * next * next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use crate::geometry::{Norm, TargetSet};
    use crate::responses::{example1_matrix, example1_vertices};
    use proptest::prelude::*;

    #[test]
    fn block_indexing() {
        let expected = [(1, 1), (2, 2), (3, 2), (4, 3), (6, 3), (7, 4), (10, 4), (11, 5)];
        for (t, n) in expected {
            assert_eq!(block_of_round(t), n, "t = {t}");
        }
        assert_eq!(completed_blocks(1), 1);
        assert_eq!(completed_blocks(2), 1);
        assert_eq!(completed_blocks(3), 2);
        assert_eq!(completed_blocks(5), 2);
        assert_eq!(completed_blocks(6), 3);
        for t in 1..5000 {
            let n = block_of_round(t);
            assert!(n * (n - 1) / 2 < t && t <= n * (n + 1) / 2);
            let big = completed_blocks(t);
            assert!(big * (big + 1) / 2 <= t && (big + 1) * (big + 2) / 2 > t);
        }
    }

    #[test]
    fn first_rounds_are_uniform() {
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar);
        assert_eq!(s.act().weights(), &[0.5, 0.5]);
        let m = example1_matrix(1.0);
        s.observe(&m).unwrap();
        // δ₂ = x₁⊙m₁ − Ψ(m₁)⊙m₁ with x₁ uniform, Ψ(m₁) = (1,0).
        let expected = [1.5 - 3.0, 4.5 - 4.0];
        assert!((s.delta()[0] - expected[0]).abs() < 1e-12);
        assert!((s.delta()[1] - expected[1]).abs() < 1e-12);
    }

    #[test]
    fn zero_discrepancy_gives_uniform_play() {
        // Dyadic entries keep every sum exact, so δ stays exactly zero.
        let uniform = MixedAction::uniform(2);
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::Constant(uniform.clone()));
        let m = example1_matrix(0.5);
        for _ in 0..100 {
            assert_eq!(s.act(), uniform);
            s.observe(&m).unwrap();
            assert!(s.delta().iter().all(|d| *d == 0.0));
        }
    }

    #[test]
    fn single_action_game_has_no_discrepancy() {
        let mut s = BlockStrategy::new(1, 1, ResponseFunction::Constant(MixedAction::pure(1, 0)));
        for k in 0..50 {
            s.act();
            s.observe(&PayoffMatrix::new(1, 1, vec![(k as f64).sin()]).unwrap()).unwrap();
            assert!(s.delta()[0].abs() < 1e-12);
            let c = s.certificate(s.rounds(), 1.0).unwrap();
            assert!(c.gap < 1e-12);
        }
    }

    #[test]
    fn certificate_small_rounds() {
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar).with_round_log();
        let ms = [example1_matrix(1.0), example1_matrix(0.0), example1_matrix(0.5)];
        let k_max = 52f64.sqrt();
        for m in &ms {
            s.act();
            s.observe(m).unwrap();
        }
        let c1 = s.certificate(1, k_max).unwrap();
        assert_eq!(c1.n, 1);
        let comp = [3.0, 4.0];
        assert!((c1.comparator[0] - comp[0]).abs() < 1e-12 && (c1.comparator[1] - comp[1]).abs() < 1e-12);
        assert!((c1.gap - (1.5f64 * 1.5 + 0.25).sqrt()).abs() < 1e-12);
        assert!(c1.gap <= k_max && k_max <= c1.bound);

        let c3 = s.certificate(3, k_max).unwrap();
        assert_eq!(c3.n, 2);
        // m̄^part = m̄^(2) = average of m(0) and m(0.5) = m(0.25) → Ψ = (1, 0).
        let mpart = example1_matrix(0.25);
        let part = combine(&MixedAction::pure(2, 0), &mpart).unwrap();
        for i in 0..2 {
            let expected = (comp[i] + 2.0 * part[i]) / 3.0;
            assert!((c3.comparator[i] - expected).abs() < 1e-12);
        }
        assert!(s.certificate(0, k_max).is_err());
        assert!(matches!(s.certificate(4, k_max), Err(Error::RoundUnavailable { .. })));
    }

    #[test]
    fn past_certificate_needs_log() {
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar);
        for _ in 0..5 {
            s.act();
            s.observe(&example1_matrix(0.3)).unwrap();
        }
        assert!(s.certificate(5, 1.0).is_ok());
        assert!(matches!(s.certificate(2, 1.0), Err(Error::RoundUnavailable { .. })));
    }

    #[test]
    fn logged_and_running_certificates_agree() {
        let mut with_log = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar).with_round_log();
        let mut running = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar);
        for t in 1..=200usize {
            let m = example1_matrix(((t * 37) % 11) as f64 / 10.0);
            with_log.act();
            running.act();
            with_log.observe(&m).unwrap();
            running.observe(&m).unwrap();
            let a = running.certificate(t, 1.0).unwrap();
            let b = with_log.certificate(t, 1.0).unwrap();
            assert!((a.gap - b.gap).abs() < 1e-9);
        }
        for t in 1..=200 {
            let c = with_log.certificate(t, 52f64.sqrt()).unwrap();
            assert!(c.gap <= c.bound);
        }
    }

    #[test]
    fn psi_called_once_per_block() {
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar);
        for _ in 0..55 {
            s.act();
            s.observe(&example1_matrix(0.6)).unwrap();
        }
        assert_eq!(s.psi_calls(), 10);
        assert_eq!(s.history().len(), 10);
        assert_eq!(s.block(), 11);
    }

    #[test]
    fn discrepancy_respects_growth_bound() {
        let target = TargetSet::negative_orthant(2, Norm::LInf).unwrap();
        let mut s = BlockStrategy::new(2, 2, ResponseFunction::XStar { target });
        let (dagger, _) = example1_vertices();
        let k_max = 52f64.sqrt();
        for _ in 0..5050 {
            s.act();
            s.observe(&dagger).unwrap();
        }
        for (n, b) in s.history().iter().enumerate() {
            assert!(b.delta_norm_after <= discrepancy_bound(k_max, 2, n + 1));
        }
        assert!(s.audit() < 1e-9);
    }

    #[test]
    fn recurrence_examples() {
        assert!(recurrence_violation(1.0, 1.0, 10_000).is_none());
        assert!(recurrence_violation(0.01, 10.0, 10_000).is_none());
        assert!(recurrence_violation(10.0, 0.01, 10_000).is_none());
    }

    proptest! {
        #[test]
        fn delta_matches_recomputation(nus in prop::collection::vec(0.0..1.0f64, 1..300)) {
            let mut s = BlockStrategy::new(2, 2, ResponseFunction::Example1XStar).with_round_log();
            for &nu in &nus {
                s.act();
                s.observe(&example1_matrix(nu)).unwrap();
                prop_assert!(s.audit() < 1e-9);
            }
        }

        #[test]
        fn constant_response_with_matching_play_keeps_zero_delta(
            w in prop::collection::vec(0.05..1.0f64, 3),
            entries in prop::collection::vec(-3.0..3.0f64, 6),
        ) {
            let x0 = MixedAction::new(w).unwrap();
            let mut s = BlockStrategy::new(2, 3, ResponseFunction::Constant(x0.clone()));
            let m = PayoffMatrix::new(2, 3, entries).unwrap();
            // Hard-wired play: feed the comparator the same constant action.
            let mut played = vec![0.0; 2];
            let mut comparator = vec![0.0; 2];
            for _ in 0..45 {
                let r = combine(&x0, &m).unwrap();
                for i in 0..2 {
                    played[i] += r[i];
                }
                s.observe(&m).unwrap();
            }
            for b in s.history() {
                for i in 0..2 {
                    comparator[i] += b.len as f64 * b.comparator[i];
                }
            }
            for i in 0..2 {
                prop_assert!((played[i] - comparator[i]).abs() < 1e-9);
            }
        }
    }
}
