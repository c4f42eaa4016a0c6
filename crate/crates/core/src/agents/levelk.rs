use crate::agents::{epsilon_greedy, epsilon_greedy_distribution, AgentRng, BeliefModel, RewardModel, Transition};
use crate::error::{check_index, invalid, Result};
use crate::scalar::Scalar;
use crate::snapshot::SnapshotWriter;
use crate::tmdp::{expected_utilities, q_update_joint_row, JointQTable, LearningParams};

/// One level of a level-k stack. Its table is indexed from its own side,
/// and its counterpart is either a fictitious-play belief (level 1) or a
/// model of the counterpart one level down.
#[derive(Debug, Clone)]
pub struct LevelNode<S> {
    q: JointQTable<S>,
    params: LearningParams<S>,
    /// How this level's reward is read off its parent's transition.
    reward: RewardModel,
    inner: Inner<S>,
}

#[derive(Debug, Clone)]
enum Inner<S> {
    Belief(BeliefModel<S>),
    Model(Box<LevelNode<S>>),
}

impl<S: Scalar> LevelNode<S> {
    /// A level-1 node.
    pub fn basis(q: JointQTable<S>, params: LearningParams<S>, reward: RewardModel, belief: BeliefModel<S>) -> Self {
        Self {
            q,
            params,
            reward,
            inner: Inner::Belief(belief),
        }
    }

    /// A node one level above `model`, which models the counterpart.
    pub fn over(q: JointQTable<S>, params: LearningParams<S>, reward: RewardModel, model: LevelNode<S>) -> Result<Self> {
        if model.q.n_actions() != q.n_opp_actions() || model.q.n_opp_actions() != q.n_actions() {
            return Err(crate::TmdpError::Dimension(format!(
                "level model has ({}, {}) actions, expected ({}, {})",
                model.q.n_actions(),
                model.q.n_opp_actions(),
                q.n_opp_actions(),
                q.n_actions()
            )));
        }
        Ok(Self {
            q,
            params,
            reward,
            inner: Inner::Model(Box::new(model)),
        })
    }

    pub fn level(&self) -> usize {
        match &self.inner {
            Inner::Belief(_) => 1,
            Inner::Model(m) => 1 + m.level(),
        }
    }

    pub fn q(&self) -> &JointQTable<S> {
        &self.q
    }

    pub fn params(&self) -> &LearningParams<S> {
        &self.params
    }

    pub fn model(&self) -> Option<&LevelNode<S>> {
        match &self.inner {
            Inner::Model(m) => Some(m),
            Inner::Belief(_) => None,
        }
    }

    /// Predicted distribution of the counterpart's action at `s`.
    pub fn counterpart_policy(&self, s: usize) -> Result<Vec<S>> {
        match &self.inner {
            Inner::Belief(b) => b.predict(s),
            Inner::Model(m) => m.policy(s),
        }
    }

    pub fn utilities(&self, s: usize) -> Result<Vec<S>> {
        check_index("state", s, self.q.n_states())?;
        Ok(expected_utilities(&self.q, &self.counterpart_policy(s)?, s))
    }

    /// This level's ε-greedy policy as seen by the level above.
    pub fn policy(&self, s: usize) -> Result<Vec<S>> {
        Ok(epsilon_greedy_distribution(&self.utilities(s)?, self.params.epsilon))
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        match &mut self.inner {
            Inner::Belief(b) => b.update(t)?,
            Inner::Model(m) => {
                let tm = t.mirrored_modeled(m.reward);
                m.observe(&tm)?;
            }
        }
        let row = self.counterpart_policy(t.s_next)?;
        q_update_joint_row(&mut self.q, t.s, t.a, t.b, t.reward, t.s_next, &row, &self.params)
    }

    fn for_each_mut(&mut self, f: &mut impl FnMut(&mut LevelNode<S>)) {
        f(self);
        if let Inner::Model(m) = &mut self.inner {
            m.for_each_mut(f);
        }
    }

    fn write_snapshot(&self, w: &mut SnapshotWriter, prefix: &str) {
        w.entry(&format!("{prefix}.reward"), self.reward.name());
        w.nested(&format!("{prefix}.q"), &self.q);
        match &self.inner {
            Inner::Belief(b) => b.write_snapshot(w, &format!("{prefix}.belief")),
            Inner::Model(m) => m.write_snapshot(w, &format!("{prefix}.model")),
        }
    }
}

/// Recursive level-k decision maker. Only the outermost level draws
/// randomness; inner levels are evaluated as ε-greedy distributions.
#[derive(Debug, Clone)]
pub struct LevelKAgent<S> {
    top: LevelNode<S>,
    rng: AgentRng,
}

impl<S: Scalar> LevelKAgent<S> {
    pub fn new(top: LevelNode<S>, rng: AgentRng) -> Result<Self> {
        if top.level() < 1 {
            return Err(invalid("level", "must be at least 1"));
        }
        Ok(Self { top, rng })
    }

    pub fn level(&self) -> usize {
        self.top.level()
    }

    pub fn top(&self) -> &LevelNode<S> {
        &self.top
    }

    pub fn act(&mut self, s: usize) -> Result<usize> {
        let psi = self.top.utilities(s)?;
        epsilon_greedy(&psi, self.top.params.epsilon.as_f64(), &mut self.rng)
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        self.top.observe(t)
    }

    pub fn exploration(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut node = Some(&self.top);
        while let Some(n) = node {
            out.push(n.params.epsilon.as_f64());
            node = n.model();
        }
        out
    }

    pub fn set_exploration(&mut self, eps: &[f64]) {
        let mut i = 0;
        self.top.for_each_mut(&mut |n| {
            if let Some(&e) = eps.get(i) {
                n.params.epsilon = S::lit(e);
            }
            i += 1;
        });
    }

    pub(crate) fn write_snapshot(&self, w: &mut SnapshotWriter) {
        w.entry("level", self.level());
        self.top.write_snapshot(w, "top");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn params(eps: f64) -> LearningParams<f64> {
        LearningParams::new(0.1, 0.8, eps).unwrap()
    }

    fn stack(k: usize) -> LevelNode<f64> {
        let mut node = LevelNode::basis(
            JointQTable::new(1, 2, 2),
            params(0.0),
            RewardModel::Observed,
            BeliefModel::dirichlet(1, 2, 1.0, 1.0).unwrap(),
        );
        for _ in 1..k {
            node = LevelNode::over(JointQTable::new(1, 2, 2), params(0.0), RewardModel::ZeroSum, node).unwrap();
        }
        node
    }

    #[test]
    fn levels_count_up() {
        assert_eq!(stack(1).level(), 1);
        assert_eq!(stack(3).level(), 3);
    }

    #[test]
    fn level_three_acts_on_nested_argmax() {
        let mut top = stack(3);
        // Level 2 prefers its action 1 whatever the DM does.
        if let Inner::Model(m) = &mut top.inner {
            m.q = JointQTable::from_fn(1, 2, 2, |_, b, _| if b == 1 { 1.0 } else { 0.0 });
        }
        top.q = JointQTable::from_fn(1, 2, 2, |_, a, b| if a == b { 1.0 } else { -1.0 });
        let predicted = top.counterpart_policy(0).unwrap();
        assert_eq!(predicted, vec![0.0, 1.0]);
        let mut ag = LevelKAgent::new(top, AgentRng::seed_from_u64(0)).unwrap();
        assert_eq!(ag.act(0).unwrap(), 1);
        assert_eq!(ag.exploration(), vec![0.0, 0.0, 0.0]);
        ag.set_exploration(&[0.3, 0.2]);
        assert_eq!(ag.exploration(), vec![0.3, 0.2, 0.0]);
    }

    #[test]
    fn mismatched_levels_rejected() {
        let inner = LevelNode::basis(
            JointQTable::new(1, 3, 2),
            params(0.0),
            RewardModel::Observed,
            BeliefModel::dirichlet(1, 2, 1.0, 1.0).unwrap(),
        );
        assert!(LevelNode::over(JointQTable::new(1, 3, 2), params(0.0), RewardModel::ZeroSum, inner).is_err());
    }
}
