use crate::agents::{epsilon_greedy, AgentRng, BeliefModel, Transition};
use crate::error::{check_index, Result};
use crate::scalar::Scalar;
use crate::tmdp::{expected_utilities, q_update_joint_row, JointQTable, LearningParams};

/// Joint-action Q-learner that best-responds to a fictitious-play belief.
#[derive(Debug, Clone)]
pub struct FpqAgent<S> {
    q: JointQTable<S>,
    belief: BeliefModel<S>,
    params: LearningParams<S>,
    rng: AgentRng,
}

impl<S: Scalar> FpqAgent<S> {
    pub fn new(q: JointQTable<S>, belief: BeliefModel<S>, params: LearningParams<S>, rng: AgentRng) -> Self {
        Self { q, belief, params, rng }
    }

    pub fn q(&self) -> &JointQTable<S> {
        &self.q
    }

    pub fn belief(&self) -> &BeliefModel<S> {
        &self.belief
    }

    pub fn params(&self) -> &LearningParams<S> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut LearningParams<S> {
        &mut self.params
    }

    /// `ψ_s(a) = Σ_b Q(s,a,b) p(b|s)` under the current belief.
    pub fn utilities(&self, s: usize) -> Result<Vec<S>> {
        check_index("state", s, self.q.n_states())?;
        Ok(expected_utilities(&self.q, &self.belief.predict(s)?, s))
    }

    pub fn act(&mut self, s: usize) -> Result<usize> {
        let psi = self.utilities(s)?;
        epsilon_greedy(&psi, self.params.epsilon.as_f64(), &mut self.rng)
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        self.belief.update(t)?;
        let row = self.belief.predict(t.s_next)?;
        q_update_joint_row(&mut self.q, t.s, t.a, t.b, t.reward, t.s_next, &row, &self.params)
    }
}
