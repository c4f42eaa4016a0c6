//! Threatened Markov decision processes: opponent-aware tabular Q-learning,
//! Bayesian opponent beliefs, level-k opponent models, and a seeded
//! experiment harness for iterated matrix games and friend-or-foe worlds.
//!
//! Tables, beliefs and agents are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar for the common cases.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod beliefs;
pub mod env;
pub mod error;
pub mod harness;
pub mod scalar;
pub mod snapshot;
pub mod tmdp;
pub mod verify;

pub use error::{Result, TmdpError};
pub use scalar::Scalar;

pub type QTable64 = tmdp::QTable<f64>;
pub type QTable32 = tmdp::QTable<f32>;
pub type JointQTable64 = tmdp::JointQTable<f64>;
pub type JointQTable32 = tmdp::JointQTable<f32>;
pub type BeliefTable64 = tmdp::BeliefTable<f64>;
pub type TmdpSpec64 = tmdp::TmdpSpec<f64>;
pub type TmdpSpec32 = tmdp::TmdpSpec<f32>;
pub type DirichletBelief64 = beliefs::DirichletBelief<f64>;
pub type DirichletBelief32 = beliefs::DirichletBelief<f32>;
