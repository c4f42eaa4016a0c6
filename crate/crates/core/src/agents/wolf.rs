use rand::Rng;

use crate::agents::{AgentRng, Transition};
use crate::error::{check_index, invalid, Result};
use crate::scalar::{argmax, Scalar};
use crate::snapshot::{join_reals, SnapshotWriter};
use crate::tmdp::{q_update_independent, LearningParams, QTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfParams<S> {
    pub delta_win: S,
    pub delta_lose: S,
}

impl<S: Scalar> Default for WolfParams<S> {
    fn default() -> Self {
        Self {
            delta_win: S::lit(0.05),
            delta_lose: S::lit(0.2),
        }
    }
}

impl<S: Scalar> WolfParams<S> {
    pub fn new(delta_win: S, delta_lose: S) -> Result<Self> {
        if !(delta_win > S::zero()) {
            return Err(invalid("delta_win", "must be positive"));
        }
        if !(delta_lose > delta_win) {
            return Err(invalid("delta_lose", "must exceed delta_win"));
        }
        Ok(Self { delta_win, delta_lose })
    }
}

/// Win-or-learn-fast policy hill climber.
#[derive(Debug, Clone)]
pub struct WolfAgent<S> {
    q: QTable<S>,
    policy: Vec<S>,
    average_policy: Vec<S>,
    visits: Vec<u64>,
    params: LearningParams<S>,
    wolf: WolfParams<S>,
    rng: AgentRng,
}

impl<S: Scalar> WolfAgent<S> {
    pub fn new(n_states: usize, n_actions: usize, params: LearningParams<S>, wolf: WolfParams<S>, rng: AgentRng) -> Self {
        let uniform = S::one() / S::from_usize_lossy(n_actions);
        Self {
            q: QTable::new(n_states, n_actions),
            policy: vec![uniform; n_states * n_actions],
            average_policy: vec![uniform; n_states * n_actions],
            visits: vec![0; n_states],
            params,
            wolf,
            rng,
        }
    }

    fn n_actions(&self) -> usize {
        self.q.n_actions()
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

    pub fn policy(&self, s: usize) -> &[S] {
        let n = self.n_actions();
        &self.policy[s * n..(s + 1) * n]
    }

    pub fn average_policy(&self, s: usize) -> &[S] {
        let n = self.n_actions();
        &self.average_policy[s * n..(s + 1) * n]
    }

    pub fn visits(&self, s: usize) -> u64 {
        self.visits[s]
    }

    pub fn set_policy(&mut self, s: usize, p: &[S]) -> Result<()> {
        check_index("state", s, self.q.n_states())?;
        if p.len() != self.n_actions() || !crate::scalar::is_distribution(p) {
            return Err(crate::TmdpError::NotNormalized(format!("policy {p:?}")));
        }
        let n = self.n_actions();
        self.policy[s * n..(s + 1) * n].copy_from_slice(p);
        Ok(())
    }

    /// Samples the mixed policy, or a uniform action with probability ε.
    pub fn act(&mut self, s: usize) -> Result<usize> {
        check_index("state", s, self.q.n_states())?;
        let n = self.n_actions();
        let u: f64 = self.rng.gen();
        if u < self.params.epsilon.as_f64() {
            return Ok(self.rng.gen_range(0..n));
        }
        let v: f64 = self.rng.gen();
        let mut acc = 0.0;
        let row = self.policy(s);
        for (a, p) in row.iter().enumerate() {
            acc += p.as_f64();
            if v < acc {
                return Ok(a);
            }
        }
        Ok(row.iter().rposition(|p| *p > S::zero()).unwrap_or(n - 1))
    }

    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        q_update_independent(&mut self.q, t.s, t.a, t.reward, t.s_next, &self.params)?;
        let s = t.s;
        let n = self.n_actions();
        self.visits[s] += 1;
        let c = S::lit(self.visits[s] as f64);
        let range = s * n..(s + 1) * n;
        for (avg, &p) in self.average_policy[range.clone()].iter_mut().zip(&self.policy[range.clone()]) {
            *avg += (p - *avg) / c;
        }
        let q = self.q.row(s);
        let v_pi: S = q.iter().zip(&self.policy[range.clone()]).map(|(&x, &p)| x * p).sum();
        let v_avg: S = q.iter().zip(&self.average_policy[range.clone()]).map(|(&x, &p)| x * p).sum();
        let delta = if v_pi >= v_avg { self.wolf.delta_win } else { self.wolf.delta_lose };
        let greedy = argmax(q).expect("nonempty action set");
        hill_climb(&mut self.policy[range], greedy, delta);
        Ok(())
    }

    pub(crate) fn write_snapshot(&self, w: &mut SnapshotWriter) {
        w.nested("q", &self.q);
        w.entry("policy", join_reals(&self.policy));
        w.entry("average_policy", join_reals(&self.average_policy));
        let visits: Vec<String> = self.visits.iter().map(u64::to_string).collect();
        w.entry("visits", visits.join(","));
        w.entry("delta_win", self.wolf.delta_win.as_f64());
        w.entry("delta_lose", self.wolf.delta_lose.as_f64());
    }
}

/// Moves `δ` mass toward `greedy`, taking `δ/(n−1)` from every other
/// action, then clips at zero and renormalizes.
pub(crate) fn hill_climb<S: Scalar>(policy: &mut [S], greedy: usize, delta: S) {
    let n = policy.len();
    if n < 2 {
        return;
    }
    let share = delta / S::from_usize_lossy(n - 1);
    for (a, p) in policy.iter_mut().enumerate() {
        let moved = if a == greedy { *p + delta } else { *p - share };
        *p = moved.max(S::zero()).min(S::one());
    }
    let total: S = policy.iter().copied().sum();
    for p in policy.iter_mut() {
        *p /= total;
    }
}
