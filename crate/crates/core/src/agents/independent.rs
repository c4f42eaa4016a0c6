use crate::agents::{epsilon_greedy, AgentRng, Transition};
use crate::error::{check_index, Result};
use crate::scalar::Scalar;
use crate::tmdp::{q_update_independent, LearningParams, QTable};

/// Plain Q-learner that ignores the counterpart.
#[derive(Debug, Clone)]
pub struct IndependentQAgent<S> {
    q: QTable<S>,
    params: LearningParams<S>,
    rng: AgentRng,
}

impl<S: Scalar> IndependentQAgent<S> {
    pub fn new(n_states: usize, n_actions: usize, params: LearningParams<S>, rng: AgentRng) -> Self {
        Self::with_table(QTable::new(n_states, n_actions), params, rng)
    }

    pub fn with_table(q: QTable<S>, params: LearningParams<S>, rng: AgentRng) -> Self {
        Self { q, params, rng }
    }

    pub fn q(&self) -> &QTable<S> {
        &self.q
    }

    pub fn params(&self) -> &LearningParams<S> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut LearningParams<S> {
        &mut self.params
    }

    pub fn act(&mut self, s: usize) -> Result<usize> {
        check_index("state", s, self.q.n_states())?;
        epsilon_greedy(self.q.row(s), self.params.epsilon.as_f64(), &mut self.rng)
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        q_update_independent(&mut self.q, t.s, t.a, t.reward, t.s_next, &self.params)
    }
}
