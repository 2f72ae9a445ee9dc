//! Approachability in unknown games.
//!
//! The opponent picks a payoff matrix `m ∈ ℝ^{d×A}` each round and the player
//! earns `x⊙m = Σ_a x_a m_a` for its mixed action `x`. The crate provides the
//! block regret-minimization strategy, the target functions it is measured
//! against, a projection-free strategy for known games, adversaries and an
//! experiment harness.

pub mod error;
pub mod geometry;
mod lp;
mod qp;
pub mod regret;
pub mod blocks;
pub mod responses;
pub mod targets;
pub mod blackwell;
pub mod scenarios;
pub mod harness;

pub use error::{Error, Result};
pub use geometry::{
    body_norm_bound, combine, distance_to_expansion, project_to_simplex, ConvexBody, MixedAction, Norm,
    PayoffMatrix, SetShape, TargetSet,
};
