use crate::agents::Transition;
use crate::beliefs::{BloomConditionalModel, DirichletBelief, MarkovMixtureModel};
use crate::error::{check_index, Result};
use crate::scalar::Scalar;
use crate::snapshot::SnapshotWriter;

/// An agent's predictive model of its counterpart's next action.
#[derive(Debug, Clone, PartialEq)]
pub enum BeliefModel<S> {
    /// One Dirichlet per state.
    Dirichlet(Vec<DirichletBelief<S>>),
    Bloom(BloomConditionalModel<S>),
    /// Markov mixture, plus the previous joint action it conditions on.
    Mixture {
        model: MarkovMixtureModel<S>,
        prev: Option<(usize, usize)>,
    },
}

impl<S: Scalar> BeliefModel<S> {
    pub fn dirichlet(n_states: usize, n_opp: usize, prior: S, forget_lambda: S) -> Result<Self> {
        let d = DirichletBelief::symmetric(n_opp, prior, forget_lambda)?;
        Ok(Self::Dirichlet(vec![d; n_states]))
    }

    /// Predictive distribution over the counterpart's action at `s`.
    pub fn predict(&self, s: usize) -> Result<Vec<S>> {
        match self {
            Self::Dirichlet(per_state) => {
                check_index("state", s, per_state.len())?;
                per_state[s].predictive()
            }
            Self::Bloom(m) => m.conditional_predictive(s),
            Self::Mixture { model, prev } => {
                model.mixture_predictive(prev.map(|p| p.0), prev.map(|p| p.1), s)
            }
        }
    }

    /// Record the counterpart's action `t.b` at `t.s`. The mixture context
    /// resets after a terminal step.
    pub fn update(&mut self, t: &Transition<S>) -> Result<()> {
        match self {
            Self::Dirichlet(per_state) => {
                check_index("state", t.s, per_state.len())?;
                per_state[t.s].update(t.b)
            }
            Self::Bloom(m) => m.update(t.s, t.b),
            Self::Mixture { model, prev } => {
                model.observe(prev.map(|p| p.0), prev.map(|p| p.1), t.s, t.b)?;
                *prev = if t.terminal { None } else { Some((t.a, t.b)) };
                Ok(())
            }
        }
    }

    pub(crate) fn write_snapshot(&self, w: &mut SnapshotWriter, prefix: &str) {
        match self {
            Self::Dirichlet(per_state) => {
                w.entry(&format!("{prefix}.model"), "dirichlet");
                w.entry(&format!("{prefix}.states"), per_state.len());
                for (s, d) in per_state.iter().enumerate() {
                    w.nested(&format!("{prefix}.state.{s}"), d);
                }
            }
            Self::Bloom(m) => {
                w.entry(&format!("{prefix}.model"), "bloom");
                w.nested(prefix, m);
            }
            Self::Mixture { model, prev } => {
                w.entry(&format!("{prefix}.model"), "mixture");
                if let Some((a, b)) = prev {
                    w.entry(&format!("{prefix}.prev"), format!("{a},{b}"));
                }
                w.nested(prefix, model);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(s: usize, b: usize) -> Transition<f64> {
        Transition {
            s,
            a: 0,
            b,
            reward: 0.0,
            opp_reward: 0.0,
            s_next: s,
            terminal: false,
            revealed: None,
        }
    }

    #[test]
    fn dirichlet_per_state_is_independent() {
        let mut m = BeliefModel::<f64>::dirichlet(2, 2, 1.0, 1.0).unwrap();
        m.update(&step(0, 1)).unwrap();
        let p0 = m.predict(0).unwrap();
        assert!((p0[0] - 1.0 / 3.0).abs() < 1e-15 && (p0[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.predict(1).unwrap(), vec![0.5, 0.5]);
        assert!(m.predict(2).is_err());
    }

    #[test]
    fn mixture_tracks_previous_joint_action() {
        let mix = MarkovMixtureModel::new([0.0, 1.0, 0.0], 1, 2, 2, 1.0, 1.0).unwrap();
        let mut m = BeliefModel::Mixture { model: mix, prev: None };
        m.update(&step(0, 1)).unwrap();
        m.update(&step(0, 1)).unwrap();
        // After b=1, the opponent has repeated b=1 once.
        let p = m.predict(0).unwrap();
        assert!((p[1] - 2.0 / 3.0).abs() < 1e-12);
    }
}
