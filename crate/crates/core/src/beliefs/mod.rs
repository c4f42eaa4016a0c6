//! Opponent-action belief models.
//!
//! Every model exposes a predictive distribution over the opponent's
//! actions; all of them are value types that can be cloned for snapshots.

pub(crate) mod bloom;
mod dirichlet;
mod mixture;

pub use bloom::{BloomConditionalModel, BloomParams, CountingBloomFilter};
pub use dirichlet::DirichletBelief;
pub use mixture::MarkovMixtureModel;
