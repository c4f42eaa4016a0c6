//! Learning and scripted agents behind one act/observe interface.
//!
//! Every agent sees the world from its own side: in a [`Transition`] the
//! field `a` is the agent's own action and `b` its counterpart's, whether the
//! agent is the decision maker or the adversary. The harness mirrors
//! transitions for the adversary side.

mod belief_model;
mod config;
mod fpq;
mod independent;
mod level2;
mod levelk;
mod smoother;
mod tft;
mod wolf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use belief_model::BeliefModel;
pub use config::{
    build_agent, AgentConfig, AgentContext, AgentKind, BeliefConfig, BeliefKind, Decay, Observation,
    RewardModel, Side,
};
pub use fpq::FpqAgent;
pub use independent::IndependentQAgent;
pub use level2::Level2Agent;
pub use levelk::{LevelKAgent, LevelNode};
pub use smoother::{SmootherAdversary, SmootherState};
pub use tft::TitForTat;
pub use wolf::{WolfAgent, WolfParams};

use crate::error::{invalid, Result};
use crate::scalar::{argmax, Scalar};
use crate::snapshot::SnapshotWriter;

/// Per-agent random stream.
pub type AgentRng = ChaCha8Rng;

/// One step of interaction seen from the observing agent's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition<S> {
    pub s: usize,
    /// Own action.
    pub a: usize,
    /// Counterpart's action.
    pub b: usize,
    pub reward: S,
    pub opp_reward: S,
    pub s_next: usize,
    pub terminal: bool,
    /// The decision maker's committed choice when the environment reveals
    /// one (the target picked in friend-or-foe games).
    pub revealed: Option<usize>,
}

impl<S: Scalar> Transition<S> {
    /// The same step from the counterpart's side.
    pub fn mirrored(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            reward: self.opp_reward,
            opp_reward: self.reward,
            ..*self
        }
    }

    /// Counterpart's view, with its reward replaced by a modeled one.
    pub fn mirrored_modeled(&self, model: RewardModel) -> Self {
        Self {
            reward: model.apply(self.reward, self.opp_reward),
            ..self.mirrored()
        }
    }
}

/// With probability `1 − ε` the argmax (lowest index on ties), otherwise a
/// uniformly random index. Always consumes one uniform draw, plus one more
/// when exploring.
pub fn epsilon_greedy<S: Scalar, R: Rng + ?Sized>(values: &[S], epsilon: f64, rng: &mut R) -> Result<usize> {
    if values.is_empty() {
        return Err(invalid("values", "epsilon-greedy over an empty action set"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid("epsilon", format!("{epsilon} not in [0, 1]")));
    }
    let u: f64 = rng.gen();
    if u < epsilon {
        Ok(rng.gen_range(0..values.len()))
    } else {
        Ok(argmax(values).expect("nonempty"))
    }
}

/// Action distribution of an ε-greedy chooser over `values`.
pub fn epsilon_greedy_distribution<S: Scalar>(values: &[S], epsilon: S) -> Vec<S> {
    let n = values.len();
    let spread = epsilon / S::from_usize_lossy(n);
    let mut p = vec![spread; n];
    if let Some(best) = argmax(values) {
        p[best] += S::one() - epsilon;
    }
    p
}

/// Uniform wrapper over every agent kind.
#[derive(Debug, Clone)]
pub enum AgentHandle<S> {
    IndependentQ(IndependentQAgent<S>),
    Fpq(FpqAgent<S>),
    Level2(Level2Agent<S>),
    LevelK(LevelKAgent<S>),
    Wolf(WolfAgent<S>),
    Tft(TitForTat),
    Smoother(SmootherAdversary<S>),
}

impl<S: Scalar> AgentHandle<S> {
    pub fn kind(&self) -> AgentKind {
        match self {
            Self::IndependentQ(_) => AgentKind::IndependentQ,
            Self::Fpq(_) => AgentKind::Fpq,
            Self::Level2(_) => AgentKind::Level2,
            Self::LevelK(_) => AgentKind::LevelK,
            Self::Wolf(_) => AgentKind::WolfPhc,
            Self::Tft(_) => AgentKind::Tft,
            Self::Smoother(_) => AgentKind::Smoother,
        }
    }

    pub fn act(&mut self, s: usize) -> Result<usize> {
        match self {
            Self::IndependentQ(x) => x.act(s),
            Self::Fpq(x) => x.act(s),
            Self::Level2(x) => x.act(s),
            Self::LevelK(x) => x.act(s),
            Self::Wolf(x) => x.act(s),
            Self::Tft(x) => x.act(s),
            Self::Smoother(x) => Ok(x.act()),
        }
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        match self {
            Self::IndependentQ(x) => x.observe(t),
            Self::Fpq(x) => x.observe(t),
            Self::Level2(x) => x.observe(t),
            Self::LevelK(x) => x.observe(t),
            Self::Wolf(x) => x.observe(t),
            Self::Tft(_) => Ok(()),
            Self::Smoother(x) => x.observe(t),
        }
    }

    /// Exploration rates, outermost level first.
    pub fn exploration(&self) -> Vec<f64> {
        match self {
            Self::IndependentQ(x) => vec![x.params().epsilon.as_f64()],
            Self::Fpq(x) => vec![x.params().epsilon.as_f64()],
            Self::Level2(x) => vec![x.params().epsilon.as_f64(), x.opp_params().epsilon.as_f64()],
            Self::LevelK(x) => x.exploration(),
            Self::Wolf(x) => vec![x.params().epsilon.as_f64()],
            Self::Tft(_) | Self::Smoother(_) => Vec::new(),
        }
    }

    /// Overwrites exploration rates; extra entries are ignored.
    pub fn set_exploration(&mut self, eps: &[f64]) {
        let get = |i: usize| eps.get(i).copied().map(S::lit);
        match self {
            Self::IndependentQ(x) => {
                if let Some(e) = get(0) {
                    x.params_mut().epsilon = e;
                }
            }
            Self::Fpq(x) => {
                if let Some(e) = get(0) {
                    x.params_mut().epsilon = e;
                }
            }
            Self::Level2(x) => {
                if let Some(e) = get(0) {
                    x.params_mut().epsilon = e;
                }
                if let Some(e) = get(1) {
                    x.opp_params_mut().epsilon = e;
                }
            }
            Self::LevelK(x) => x.set_exploration(eps),
            Self::Wolf(x) => {
                if let Some(e) = get(0) {
                    x.params_mut().epsilon = e;
                }
            }
            Self::Tft(_) | Self::Smoother(_) => {}
        }
    }

    /// Plain-text snapshot of the agent's learned state.
    pub fn checkpoint(&self) -> String {
        let mut w = SnapshotWriter::new();
        w.entry("agent", self.kind().name());
        match self {
            Self::IndependentQ(x) => {
                w.nested("q", x.q());
            }
            Self::Fpq(x) => {
                w.nested("q", x.q());
                x.belief().write_snapshot(&mut w, "belief");
            }
            Self::Level2(x) => {
                w.nested("q", x.q());
                w.nested("opp_q", x.opp_q());
                x.opp_belief().write_snapshot(&mut w, "opp_belief");
            }
            Self::LevelK(x) => x.write_snapshot(&mut w),
            Self::Wolf(x) => x.write_snapshot(&mut w),
            Self::Tft(_) => {}
            Self::Smoother(x) => {
                w.entry("p", crate::snapshot::join_reals(x.state().p()));
                w.entry("smoother_alpha", x.state().alpha().as_f64());
            }
        }
        w.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn epsilon_greedy_examples() {
        let mut rng = AgentRng::seed_from_u64(1);
        assert_eq!(epsilon_greedy(&[1.0, 3.0, 2.0], 0.0, &mut rng).unwrap(), 1);
        assert_eq!(epsilon_greedy(&[5.0, 5.0], 0.0, &mut rng).unwrap(), 0);
        assert!(epsilon_greedy::<f64, _>(&[], 0.1, &mut rng).is_err());
        assert!(epsilon_greedy(&[1.0], 1.5, &mut rng).is_err());
    }

    #[test]
    fn epsilon_one_is_uniform_within_three_sigma() {
        let mut rng = AgentRng::seed_from_u64(77);
        let n = 10_000;
        let k = 4;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[epsilon_greedy(&[0.0, 9.0, 1.0, 2.0], 1.0, &mut rng).unwrap()] += 1;
        }
        let p = 1.0 / k as f64;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn greedy_distribution() {
        let p = epsilon_greedy_distribution(&[0.0f64, 2.0, 1.0], 0.3);
        assert!((p[0] - 0.1).abs() < 1e-15);
        assert!((p[1] - 0.8).abs() < 1e-15);
        assert_eq!(epsilon_greedy_distribution(&[1.0, 1.0], 0.0), vec![1.0, 0.0]);
    }

    #[test]
    fn mirror_swaps_sides() {
        let t = Transition {
            s: 1,
            a: 0,
            b: 1,
            reward: 50.0,
            opp_reward: -50.0,
            s_next: 2,
            terminal: false,
            revealed: Some(0),
        };
        let m = t.mirrored();
        assert_eq!((m.a, m.b, m.reward, m.opp_reward), (1, 0, -50.0, 50.0));
        assert_eq!(m.mirrored(), t);
        let z = t.mirrored_modeled(RewardModel::Binary);
        assert_eq!(z.reward, 0.0);
    }
}
