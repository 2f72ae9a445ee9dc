//! Polynomially weighted average forecaster for scalar payoff vectors.
//!
//! Parameter-free in both the payoff range and the horizon. The known
//! worst-case bound is `2√(2e)·B·√(T ln A) ≈ 4.66·B·√(T ln A)`.

use crate::error::{Error, Result};
use crate::geometry::MixedAction;

#[derive(Debug, Clone)]
pub struct PolynomialWeights {
    regret: Vec<f64>,
    exponent: f64,
    rounds: usize,
    current: MixedAction,
}

/// The exponent `q = max(2, 2 ln A)`.
pub fn default_exponent(actions: usize) -> f64 {
    (2.0 * (actions as f64).ln()).max(2.0)
}

impl PolynomialWeights {
    pub fn new(actions: usize) -> Self {
        Self::with_exponent(actions, default_exponent(actions))
    }

    pub fn with_exponent(actions: usize, exponent: f64) -> Self {
        assert!(actions >= 1, "forecaster needs at least one action");
        PolynomialWeights {
            regret: vec![0.0; actions],
            exponent,
            rounds: 0,
            current: MixedAction::uniform(actions),
        }
    }

    pub fn actions(&self) -> usize {
        self.regret.len()
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn regret(&self) -> &[f64] {
        &self.regret
    }

    /// The action for the coming round.
    pub fn next_action(&self) -> &MixedAction {
        &self.current
    }

    /// Feeds the payoff vector of the round just played.
    pub fn observe(&mut self, payoff: &[f64]) -> Result<()> {
        if payoff.len() != self.regret.len() {
            return Err(Error::DimensionMismatch {
                what: "scalar payoff vector",
                expected: self.regret.len(),
                found: payoff.len(),
            });
        }
        if payoff.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("payoffs must be finite".into()));
        }
        let played: f64 = self.current.weights().iter().zip(payoff).map(|(u, p)| u * p).sum();
        for (r, p) in self.regret.iter_mut().zip(payoff) {
            *r += p - played;
        }
        self.rounds += 1;
        self.current = weights_from_regret(&self.regret, self.exponent);
        Ok(())
    }
}

/// Weights proportional to `(R_a⁺)^{q−1}`, uniform when no regret is positive.
pub fn weights_from_regret(regret: &[f64], exponent: f64) -> MixedAction {
    let top = regret.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return MixedAction::uniform(regret.len());
    }
    // Scaling by the largest entry keeps the powers in range and makes the
    // output exactly invariant to payoff rescaling.
    let w: Vec<f64> = regret
        .iter()
        .map(|r| (r.max(0.0) / top).powf(exponent - 1.0))
        .collect();
    MixedAction::new(w).expect("positive part has a unit entry")
}

/// `max_a Σ_t m′_{t,a} − Σ_t ⟨u_t, m′_t⟩` of a forecaster run on `sequence`.
pub fn replay_regret(sequence: &[Vec<f64>]) -> Result<f64> {
    let actions = sequence.first().map_or(1, Vec::len);
    let mut forecaster = PolynomialWeights::new(actions);
    for payoff in sequence {
        forecaster.observe(payoff)?;
    }
    Ok(forecaster.regret().iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// The contract bound `4·B·√(T ln A)`.
pub fn contract_bound(range: f64, rounds: usize, actions: usize) -> f64 {
    4.0 * range * (rounds as f64 * (actions as f64).ln()).sqrt()
}
