use crate::agents::{epsilon_greedy, epsilon_greedy_distribution, AgentRng, BeliefModel, RewardModel, Transition};
use crate::error::{check_index, Result};
use crate::scalar::Scalar;
use crate::tmdp::{expected_utilities, q_update_joint_row, JointQTable, LearningParams};

/// Decision maker that models its counterpart as a fictitious-play
/// Q-learner and best-responds to that model's ε-greedy policy.
#[derive(Debug, Clone)]
pub struct Level2Agent<S> {
    /// `Q_A(s, a, b)`.
    q: JointQTable<S>,
    /// `Q_B(s, b, a)`: the counterpart's table as the agent imagines it.
    opp_q: JointQTable<S>,
    /// `p_B(a | s)`: the counterpart's imagined belief about this agent.
    opp_belief: BeliefModel<S>,
    params: LearningParams<S>,
    opp_params: LearningParams<S>,
    opp_reward: RewardModel,
    rng: AgentRng,
}

impl<S: Scalar> Level2Agent<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q: JointQTable<S>,
        opp_q: JointQTable<S>,
        opp_belief: BeliefModel<S>,
        params: LearningParams<S>,
        opp_params: LearningParams<S>,
        opp_reward: RewardModel,
        rng: AgentRng,
    ) -> Self {
        Self {
            q,
            opp_q,
            opp_belief,
            params,
            opp_params,
            opp_reward,
            rng,
        }
    }

    pub fn q(&self) -> &JointQTable<S> {
        &self.q
    }

    pub fn opp_q(&self) -> &JointQTable<S> {
        &self.opp_q
    }

    pub fn opp_belief(&self) -> &BeliefModel<S> {
        &self.opp_belief
    }

    pub fn params(&self) -> &LearningParams<S> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut LearningParams<S> {
        &mut self.params
    }

    pub fn opp_params(&self) -> &LearningParams<S> {
        &self.opp_params
    }

    pub fn opp_params_mut(&mut self) -> &mut LearningParams<S> {
        &mut self.opp_params
    }

    pub fn opp_reward(&self) -> RewardModel {
        self.opp_reward
    }

    /// `p_A(b | s)`: ε_B-greedy over the counterpart's expected utilities.
    pub fn predicted_opponent_policy(&self, s: usize) -> Result<Vec<S>> {
        check_index("state", s, self.opp_q.n_states())?;
        let pb = self.opp_belief.predict(s)?;
        let psi_b = expected_utilities(&self.opp_q, &pb, s);
        Ok(epsilon_greedy_distribution(&psi_b, self.opp_params.epsilon))
    }

    pub fn utilities(&self, s: usize) -> Result<Vec<S>> {
        let pa = self.predicted_opponent_policy(s)?;
        Ok(expected_utilities(&self.q, &pa, s))
    }

    pub fn act(&mut self, s: usize) -> Result<usize> {
        let psi = self.utilities(s)?;
        epsilon_greedy(&psi, self.params.epsilon.as_f64(), &mut self.rng)
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        let tb = t.mirrored_modeled(self.opp_reward);
        self.opp_belief.update(&tb)?;
        let pb_next = self.opp_belief.predict(tb.s_next)?;
        q_update_joint_row(&mut self.opp_q, tb.s, tb.a, tb.b, tb.reward, tb.s_next, &pb_next, &self.opp_params)?;
        let pa_next = self.predicted_opponent_policy(t.s_next)?;
        q_update_joint_row(&mut self.q, t.s, t.a, t.b, t.reward, t.s_next, &pa_next, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn agent(alpha: f64, opp_alpha: f64, gamma: f64, opp_eps: f64) -> Level2Agent<f64> {
        Level2Agent::new(
            JointQTable::new(1, 2, 2),
            JointQTable::new(1, 2, 2),
            BeliefModel::dirichlet(1, 2, 1.0, 1.0).unwrap(),
            LearningParams::frozen_ok(alpha, gamma, 0.0).unwrap(),
            LearningParams::frozen_ok(opp_alpha, gamma, opp_eps).unwrap(),
            RewardModel::Observed,
            AgentRng::seed_from_u64(9),
        )
    }

    fn step(r: f64) -> Transition<f64> {
        Transition {
            s: 0,
            a: 0,
            b: 1,
            reward: r,
            opp_reward: -r,
            s_next: 0,
            terminal: false,
            revealed: None,
        }
    }

    #[test]
    fn hand_executed_update() {
        let mut ag = agent(1.0, 1.0, 0.0, 0.1);
        ag.observe(&step(50.0)).unwrap();
        assert_eq!(ag.q().get(0, 0, 1), 50.0);
        assert_eq!(ag.opp_q().get(0, 1, 0), -50.0);
    }

    #[test]
    fn frozen_rates_leave_tables_alone() {
        let mut ag = agent(0.0, 0.0, 0.9, 0.1);
        ag.observe(&step(50.0)).unwrap();
        assert!(ag.q().values().iter().all(|&v| v == 0.0));
        assert!(ag.opp_q().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn greedy_chain() {
        let mut ag = agent(0.1, 0.1, 0.9, 0.0);
        ag.opp_q = JointQTable::from_fn(1, 2, 2, |_, b, _| if b == 1 { 5.0 } else { 0.0 });
        ag.q = JointQTable::from_fn(1, 2, 2, |_, a, b| if (a, b) == (1, 1) { 3.0 } else { 0.0 });
        assert_eq!(ag.predicted_opponent_policy(0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(ag.act(0).unwrap(), 1);
    }

    #[test]
    fn zero_sum_model_negates() {
        let mut ag = agent(1.0, 1.0, 0.0, 0.1);
        ag.opp_reward = RewardModel::ZeroSum;
        let mut t = step(50.0);
        t.opp_reward = 3.0;
        ag.observe(&t).unwrap();
        assert_eq!(ag.opp_q().get(0, 1, 0), -50.0);
    }
}
