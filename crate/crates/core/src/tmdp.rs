//! Q-tables, the three learning-rule updates, and the two Bellman-style
//! operators over an explicit TMDP.
//!
//! Joint tables are indexed `(state, own action, opponent action)`. The
//! operators are written in that order as well; `(Hq)(s, a, b)` is the same
//! quantity the appendix-style notation writes as `(Hq)(s, b, a)`.

use rand::Rng;

use crate::error::{check_index, invalid, Result, TmdpError};
use crate::scalar::{argmax, is_distribution, max_of, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningParams<S> {
    pub alpha: S,
    pub gamma: S,
    pub epsilon: S,
}

impl<S: Scalar> LearningParams<S> {
    /// Rejects `alpha` outside (0, 1], `gamma` outside [0, 1) and `epsilon`
    /// outside [0, 1].
    pub fn new(alpha: S, gamma: S, epsilon: S) -> Result<Self> {
        if !(alpha > S::zero() && alpha <= S::one()) {
            return Err(invalid("alpha", format!("{alpha} not in (0, 1]")));
        }
        if !(gamma >= S::zero() && gamma < S::one()) {
            return Err(invalid("gamma", format!("{gamma} not in [0, 1)")));
        }
        if !(epsilon >= S::zero() && epsilon <= S::one()) {
            return Err(invalid("epsilon", format!("{epsilon} not in [0, 1]")));
        }
        Ok(Self {
            alpha,
            gamma,
            epsilon,
        })
    }

    /// Same as [`LearningParams::new`] but also admits `alpha == 0`, which
    /// freezes a table. Used by tests and by modeled opponents that should
    /// not learn.
    pub fn frozen_ok(alpha: S, gamma: S, epsilon: S) -> Result<Self> {
        if alpha == S::zero() {
            Self::new(S::one(), gamma, epsilon).map(|p| Self { alpha, ..p })
        } else {
            Self::new(alpha, gamma, epsilon)
        }
    }
}

/// Sup-norm distance between two tables of identical shape.
pub trait SupNorm<S> {
    fn sup_dist(&self, other: &Self) -> S;
}

fn sup_dist_slices<S: Scalar>(x: &[S], y: &[S]) -> S {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b).abs())
        .fold(S::zero(), S::max)
}

/// Dense `Q(s, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable<S> {
    n_states: usize,
    n_actions: usize,
    values: Vec<S>,
}

impl<S: Scalar> QTable<S> {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Self::filled(n_states, n_actions, S::zero())
    }

    pub fn filled(n_states: usize, n_actions: usize, value: S) -> Self {
        Self {
            n_states,
            n_actions,
            values: vec![value; n_states * n_actions],
        }
    }

    pub fn from_fn(n_states: usize, n_actions: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut values = Vec::with_capacity(n_states * n_actions);
        for s in 0..n_states {
            for a in 0..n_actions {
                values.push(f(s, a));
            }
        }
        Self {
            n_states,
            n_actions,
            values,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, s: usize, a: usize) -> S {
        self.values[s * self.n_actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: S) {
        self.values[s * self.n_actions + a] = v;
    }

    pub fn row(&self, s: usize) -> &[S] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn row_mut(&mut self, s: usize) -> &mut [S] {
        &mut self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn max_at(&self, s: usize) -> S {
        max_of(self.row(s))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_states: usize, n_actions: usize, scale: f64) -> Self {
        Self::from_fn(n_states, n_actions, |_, _| S::lit(rng.gen_range(-scale..=scale)))
    }

    fn check(&self, s: usize, a: usize) -> Result<()> {
        check_index("state", s, self.n_states)?;
        check_index("action", a, self.n_actions)
    }
}

impl<S: Scalar> SupNorm<S> for QTable<S> {
    fn sup_dist(&self, other: &Self) -> S {
        sup_dist_slices(&self.values, &other.values)
    }
}

/// Dense `Q(s, a, b)`: own action `a`, opponent action `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointQTable<S> {
    n_states: usize,
    n_actions: usize,
    n_opp_actions: usize,
    values: Vec<S>,
}

impl<S: Scalar> JointQTable<S> {
    pub fn new(n_states: usize, n_actions: usize, n_opp_actions: usize) -> Self {
        Self::filled(n_states, n_actions, n_opp_actions, S::zero())
    }

    pub fn filled(n_states: usize, n_actions: usize, n_opp_actions: usize, value: S) -> Self {
        Self {
            n_states,
            n_actions,
            n_opp_actions,
            values: vec![value; n_states * n_actions * n_opp_actions],
        }
    }

    pub fn from_fn(
        n_states: usize,
        n_actions: usize,
        n_opp_actions: usize,
        mut f: impl FnMut(usize, usize, usize) -> S,
    ) -> Self {
        let mut values = Vec::with_capacity(n_states * n_actions * n_opp_actions);
        for s in 0..n_states {
            for a in 0..n_actions {
                for b in 0..n_opp_actions {
                    values.push(f(s, a, b));
                }
            }
        }
        Self {
            n_states,
            n_actions,
            n_opp_actions,
            values,
        }
    }

    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n_states: usize,
        n_actions: usize,
        n_opp_actions: usize,
        scale: f64,
    ) -> Self {
        Self::from_fn(n_states, n_actions, n_opp_actions, |_, _, _| {
            S::lit(rng.gen_range(-scale..=scale))
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_opp_actions(&self) -> usize {
        self.n_opp_actions
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    #[inline]
    fn offset(&self, s: usize, a: usize) -> usize {
        (s * self.n_actions + a) * self.n_opp_actions
    }

    pub fn get(&self, s: usize, a: usize, b: usize) -> S {
        self.values[self.offset(s, a) + b]
    }

    pub fn set(&mut self, s: usize, a: usize, b: usize, v: S) {
        let o = self.offset(s, a);
        self.values[o + b] = v;
    }

    /// `Q(s, a, ·)` as a slice over opponent actions.
    pub fn opp_row(&self, s: usize, a: usize) -> &[S] {
        let o = self.offset(s, a);
        &self.values[o..o + self.n_opp_actions]
    }

    fn check(&self, s: usize, a: usize, b: usize) -> Result<()> {
        check_index("state", s, self.n_states)?;
        check_index("action", a, self.n_actions)?;
        check_index("opponent action", b, self.n_opp_actions)
    }
}

impl<S: Scalar> SupNorm<S> for JointQTable<S> {
    fn sup_dist(&self, other: &Self) -> S {
        sup_dist_slices(&self.values, &other.values)
    }
}

/// `p(b | s)` for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefTable<S> {
    n_opp_actions: usize,
    probs: Vec<S>,
}

impl<S: Scalar> BeliefTable<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_opp_actions = rows.first().map_or(0, Vec::len);
        if n_opp_actions == 0 {
            return Err(TmdpError::Dimension("belief table has no columns".into()));
        }
        let mut probs = Vec::with_capacity(rows.len() * n_opp_actions);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n_opp_actions {
                return Err(TmdpError::Dimension(format!(
                    "belief row {s} has {} entries, expected {n_opp_actions}",
                    row.len()
                )));
            }
            if !is_distribution(row) {
                return Err(TmdpError::NotNormalized(format!("belief row {s}: {row:?}")));
            }
            probs.extend_from_slice(row);
        }
        Ok(Self {
            n_opp_actions,
            probs,
        })
    }

    pub fn uniform(n_states: usize, n_opp_actions: usize) -> Self {
        let p = S::one() / S::from_usize_lossy(n_opp_actions);
        Self {
            n_opp_actions,
            probs: vec![p; n_states * n_opp_actions],
        }
    }

    pub fn point_mass(n_states: usize, n_opp_actions: usize, b: usize) -> Self {
        let mut probs = vec![S::zero(); n_states * n_opp_actions];
        for s in 0..n_states {
            probs[s * n_opp_actions + b] = S::one();
        }
        Self {
            n_opp_actions,
            probs,
        }
    }

    /// Rows drawn by normalizing uniform variates.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_states: usize, n_opp_actions: usize) -> Self {
        let rows = (0..n_states)
            .map(|_| random_simplex(rng, n_opp_actions))
            .collect();
        Self::new(rows).expect("random simplex rows are normalized")
    }

    pub fn n_states(&self) -> usize {
        self.probs.len() / self.n_opp_actions
    }

    pub fn n_opp_actions(&self) -> usize {
        self.n_opp_actions
    }

    pub fn row(&self, s: usize) -> &[S] {
        &self.probs[s * self.n_opp_actions..(s + 1) * self.n_opp_actions]
    }
}

pub(crate) fn random_simplex<S: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<S> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut row: Vec<S> = raw.iter().map(|x| S::lit(x / total)).collect();
    // push rounding residue into the last entry
    let head: S = row[..n - 1].iter().copied().sum();
    row[n - 1] = (S::one() - head).max(S::zero());
    row
}

/// Explicit small TMDP `(S, A, B, T, r)` used to evaluate the operators.
#[derive(Debug, Clone, PartialEq)]
pub struct TmdpSpec<S> {
    n_states: usize,
    n_dm_actions: usize,
    n_opp_actions: usize,
    /// `T(s' | s, a, b)`, laid out `[s][a][b][s']`.
    transition: Vec<S>,
    /// `r(s, a, b)`, laid out `[s][a][b]`.
    reward: Vec<S>,
}

impl<S: Scalar> TmdpSpec<S> {
    pub fn new(
        n_states: usize,
        n_dm_actions: usize,
        n_opp_actions: usize,
        transition: Vec<S>,
        reward: Vec<S>,
    ) -> Result<Self> {
        if n_states == 0 || n_dm_actions == 0 || n_opp_actions == 0 {
            return Err(TmdpError::Dimension("TMDP spaces must be nonempty".into()));
        }
        let cells = n_states * n_dm_actions * n_opp_actions;
        if transition.len() != cells * n_states {
            return Err(TmdpError::Dimension(format!(
                "transition has {} entries, expected {}",
                transition.len(),
                cells * n_states
            )));
        }
        if reward.len() != cells {
            return Err(TmdpError::Dimension(format!(
                "reward has {} entries, expected {cells}",
                reward.len()
            )));
        }
        if let Some(r) = reward.iter().find(|r| !r.is_finite()) {
            return Err(invalid("reward", format!("non-finite entry {r}")));
        }
        for (i, row) in transition.chunks(n_states).enumerate() {
            if !is_distribution(row) {
                return Err(TmdpError::NotNormalized(format!("transition row {i}: {row:?}")));
            }
        }
        Ok(Self {
            n_states,
            n_dm_actions,
            n_opp_actions,
            transition,
            reward,
        })
    }

    /// Random transitions and rewards uniform in `[-reward_scale, reward_scale]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n_states: usize,
        n_dm_actions: usize,
        n_opp_actions: usize,
        reward_scale: f64,
    ) -> Self {
        let cells = n_states * n_dm_actions * n_opp_actions;
        let mut transition = Vec::with_capacity(cells * n_states);
        for _ in 0..cells {
            transition.extend(random_simplex::<S, _>(rng, n_states));
        }
        let reward = (0..cells)
            .map(|_| S::lit(rng.gen_range(-reward_scale..=reward_scale)))
            .collect();
        Self::new(n_states, n_dm_actions, n_opp_actions, transition, reward)
            .expect("randomly generated spec is valid")
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_dm_actions(&self) -> usize {
        self.n_dm_actions
    }

    pub fn n_opp_actions(&self) -> usize {
        self.n_opp_actions
    }

    fn cell(&self, s: usize, a: usize, b: usize) -> usize {
        (s * self.n_dm_actions + a) * self.n_opp_actions + b
    }

    pub fn transition(&self, s: usize, a: usize, b: usize) -> &[S] {
        let c = self.cell(s, a, b) * self.n_states;
        &self.transition[c..c + self.n_states]
    }

    pub fn reward(&self, s: usize, a: usize, b: usize) -> S {
        self.reward[self.cell(s, a, b)]
    }
}

/// `Q(s,a) := (1-α) Q(s,a) + α (r + γ max_a' Q(s',a'))`.
pub fn q_update_independent<S: Scalar>(
    q: &mut QTable<S>,
    s: usize,
    a: usize,
    r: S,
    s_next: usize,
    params: &LearningParams<S>,
) -> Result<()> {
    q.check(s, a)?;
    check_index("next state", s_next, q.n_states)?;
    let target = r + params.gamma * q.max_at(s_next);
    let old = q.get(s, a);
    q.set(s, a, (S::one() - params.alpha) * old + params.alpha * target);
    Ok(())
}

/// `Σ_b Q(s,a,b) p(b)` for a single belief row. No validation.
#[inline]
pub fn expected_q_row<S: Scalar>(q: &JointQTable<S>, row: &[S], s: usize, a: usize) -> S {
    q.opp_row(s, a).iter().zip(row).map(|(&v, &p)| v * p).sum()
}

/// Expected utility of every own action at `s` under belief `row`.
pub fn expected_utilities<S: Scalar>(q: &JointQTable<S>, row: &[S], s: usize) -> Vec<S> {
    (0..q.n_actions).map(|a| expected_q_row(q, row, s, a)).collect()
}

/// `Σ_b Q(s,a,b) p(b|s)`.
pub fn expected_q<S: Scalar>(q: &JointQTable<S>, belief: &BeliefTable<S>, s: usize, a: usize) -> Result<S> {
    check_index("state", s, q.n_states)?;
    check_index("action", a, q.n_actions)?;
    check_index("belief state", s, belief.n_states())?;
    if belief.n_opp_actions() != q.n_opp_actions {
        return Err(TmdpError::Dimension(format!(
            "belief over {} opponent actions, table over {}",
            belief.n_opp_actions(),
            q.n_opp_actions
        )));
    }
    let row = belief.row(s);
    if !is_distribution(row) {
        return Err(TmdpError::NotNormalized(format!("belief row {s}: {row:?}")));
    }
    Ok(expected_q_row(q, row, s, a))
}

/// Joint update using an explicit belief row for `s_next`. This is the hot
/// path used by the learning agents; the row is assumed normalized.
#[allow(clippy::too_many_arguments)]
pub fn q_update_joint_row<S: Scalar>(
    q: &mut JointQTable<S>,
    s: usize,
    a: usize,
    b: usize,
    r: S,
    s_next: usize,
    next_belief: &[S],
    params: &LearningParams<S>,
) -> Result<()> {
    q.check(s, a, b)?;
    check_index("next state", s_next, q.n_states)?;
    if next_belief.len() != q.n_opp_actions {
        return Err(TmdpError::Dimension(format!(
            "belief row has {} entries, expected {}",
            next_belief.len(),
            q.n_opp_actions
        )));
    }
    let cont = (0..q.n_actions)
        .map(|a2| expected_q_row(q, next_belief, s_next, a2))
        .fold(S::neg_infinity(), S::max);
    let target = r + params.gamma * cont;
    let old = q.get(s, a, b);
    q.set(s, a, b, (S::one() - params.alpha) * old + params.alpha * target);
    Ok(())
}

/// `Q(s,a,b) := (1-α) Q(s,a,b) + α (r + γ max_a' E_{p(b'|s')} Q(s',a',b'))`.
#[allow(clippy::too_many_arguments)]
pub fn q_update_joint<S: Scalar>(
    q: &mut JointQTable<S>,
    s: usize,
    a: usize,
    b: usize,
    r: S,
    s_next: usize,
    belief: &BeliefTable<S>,
    params: &LearningParams<S>,
) -> Result<()> {
    check_index("belief state", s_next, belief.n_states())?;
    let row = belief.row(s_next);
    if !is_distribution(row) {
        return Err(TmdpError::NotNormalized(format!("belief row {s_next}: {row:?}")));
    }
    q_update_joint_row(q, s, a, b, r, s_next, row, params)
}

fn check_operator_dims<S: Scalar>(
    spec: &TmdpSpec<S>,
    belief: &BeliefTable<S>,
    n_states: usize,
    n_actions: usize,
    n_opp: Option<usize>,
) -> Result<()> {
    if n_states != spec.n_states
        || n_actions != spec.n_dm_actions
        || n_opp.is_some_and(|b| b != spec.n_opp_actions)
    {
        return Err(TmdpError::Dimension(format!(
            "table ({n_states}, {n_actions}, {n_opp:?}) does not match spec ({}, {}, {})",
            spec.n_states, spec.n_dm_actions, spec.n_opp_actions
        )));
    }
    if belief.n_states() != spec.n_states || belief.n_opp_actions() != spec.n_opp_actions {
        return Err(TmdpError::Dimension(format!(
            "belief ({}, {}) does not match spec ({}, {})",
            belief.n_states(),
            belief.n_opp_actions(),
            spec.n_states,
            spec.n_opp_actions
        )));
    }
    Ok(())
}

/// Exact evaluation of
/// `(Hq)(s,a,b) = Σ_{s'} T(s'|s,a,b) [ r(s,a,b) + γ max_{a'} E_{p(b'|s')} q(s',a',b') ]`.
pub fn apply_operator_h<S: Scalar>(
    q: &JointQTable<S>,
    spec: &TmdpSpec<S>,
    belief: &BeliefTable<S>,
    gamma: S,
) -> Result<JointQTable<S>> {
    check_operator_dims(spec, belief, q.n_states, q.n_actions, Some(q.n_opp_actions))?;
    // continuation value per next state
    let cont: Vec<S> = (0..spec.n_states)
        .map(|s2| {
            let row = belief.row(s2);
            (0..spec.n_dm_actions)
                .map(|a2| expected_q_row(q, row, s2, a2))
                .fold(S::neg_infinity(), S::max)
        })
        .collect();
    Ok(JointQTable::from_fn(
        spec.n_states,
        spec.n_dm_actions,
        spec.n_opp_actions,
        |s, a, b| {
            let r = spec.reward(s, a, b);
            spec.transition(s, a, b)
                .iter()
                .zip(&cont)
                .map(|(&p, &v)| p * (r + gamma * v))
                .sum()
        },
    ))
}

/// Exact evaluation of
/// `(H̄q̄)(s,a) = E_{p(b|s)} [ Σ_{s'} T(s'|s,a,b) ( r(s,a,b) + γ max_{a'} q̄(s',a') ) ]`.
pub fn apply_operator_hbar<S: Scalar>(
    qbar: &QTable<S>,
    spec: &TmdpSpec<S>,
    belief: &BeliefTable<S>,
    gamma: S,
) -> Result<QTable<S>> {
    check_operator_dims(spec, belief, qbar.n_states, qbar.n_actions, None)?;
    let cont: Vec<S> = (0..spec.n_states).map(|s2| qbar.max_at(s2)).collect();
    Ok(QTable::from_fn(spec.n_states, spec.n_dm_actions, |s, a| {
        belief
            .row(s)
            .iter()
            .enumerate()
            .map(|(b, &pb)| {
                let r = spec.reward(s, a, b);
                let inner: S = spec
                    .transition(s, a, b)
                    .iter()
                    .zip(&cont)
                    .map(|(&p, &v)| p * (r + gamma * v))
                    .sum();
                pb * inner
            })
            .sum()
    }))
}

/// Greedy own action at `s` under belief row (lowest index on ties).
pub fn greedy_action<S: Scalar>(q: &JointQTable<S>, row: &[S], s: usize) -> usize {
    argmax(&expected_utilities(q, row, s)).unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct FixedPoint<T, S> {
    pub value: T,
    pub iterations: usize,
    /// `‖op(q_k) − q_k‖∞` for every evaluated iterate, starting with `q0`.
    pub residuals: Vec<S>,
}

/// Iterates `q ← op(q)` until `‖op(q) − q‖∞ < tol`; returns that `q`.
pub fn fixed_point_iterate<S, T, F>(mut op: F, q0: T, tol: S, max_iters: usize) -> Result<FixedPoint<T, S>>
where
    S: Scalar,
    T: SupNorm<S>,
    F: FnMut(&T) -> Result<T>,
{
    if !(tol > S::zero()) {
        return Err(invalid("tol", format!("{tol} must be positive")));
    }
    let mut q = q0;
    let mut residuals = Vec::new();
    for iterations in 0..max_iters {
        let next = op(&q)?;
        let residual = next.sup_dist(&q);
        residuals.push(residual);
        if residual < tol {
            return Ok(FixedPoint {
                value: q,
                iterations,
                residuals,
            });
        }
        q = next;
    }
    Err(TmdpError::NonConvergence {
        iterations: max_iters,
        residual: residuals.last().map_or(f64::NAN, |r| r.as_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64, gamma: f64) -> LearningParams<f64> {
        LearningParams::frozen_ok(alpha, gamma, 0.1).unwrap()
    }

    #[test]
    fn learning_params_bounds() {
        assert!(LearningParams::new(0.3, 0.96, 0.1).is_ok());
        assert!(LearningParams::new(0.0, 0.5, 0.1).is_err());
        assert!(LearningParams::new(1.1, 0.5, 0.1).is_err());
        assert!(LearningParams::new(0.5, 1.0, 0.1).is_err());
        assert!(LearningParams::new(0.5, -0.1, 0.1).is_err());
        assert!(LearningParams::new(0.5, 0.5, 1.5).is_err());
        assert!(LearningParams::new(1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn independent_update_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q0 = QTable::<f64>::random(&mut rng, 3, 2, 5.0);

        let mut q = q0.clone();
        q_update_independent(&mut q, 1, 0, 4.0, 2, &params(0.0, 0.9)).unwrap();
        assert_eq!(q, q0);

        let mut q = q0.clone();
        q_update_independent(&mut q, 1, 1, 7.0, 2, &params(1.0, 0.0)).unwrap();
        assert_eq!(q.get(1, 1), 7.0);

        let mut q = QTable::<f64>::new(2, 2);
        q_update_independent(&mut q, 0, 1, 1.0, 1, &params(0.5, 0.9)).unwrap();
        assert_abs_diff_eq!(q.get(0, 1), 0.5, epsilon = 1e-15);

        assert!(matches!(
            q_update_independent(&mut q, 2, 0, 1.0, 0, &params(0.5, 0.9)),
            Err(TmdpError::Index { .. })
        ));
        assert!(q_update_independent(&mut q, 0, 0, 1.0, 5, &params(0.5, 0.9)).is_err());
    }

    #[test]
    fn expected_q_examples() {
        let q = JointQTable::from_fn(1, 1, 2, |_, _, b| [2.0, 4.0][b]);
        let half = BeliefTable::new(vec![vec![0.5, 0.5]]).unwrap();
        assert_abs_diff_eq!(expected_q(&q, &half, 0, 0).unwrap(), 3.0);
        let pm = BeliefTable::point_mass(1, 2, 0);
        assert_eq!(expected_q(&q, &pm, 0, 0).unwrap(), 2.0);
        let c = JointQTable::filled(1, 1, 3, -1.25);
        let skew = BeliefTable::new(vec![vec![0.1, 0.2, 0.7]]).unwrap();
        assert_abs_diff_eq!(expected_q(&c, &skew, 0, 0).unwrap(), -1.25, epsilon = 1e-15);
    }

    #[test]
    fn belief_rows_are_validated() {
        assert!(matches!(
            BeliefTable::new(vec![vec![0.5, 0.6]]),
            Err(TmdpError::NotNormalized(_))
        ));
        assert!(matches!(
            BeliefTable::<f64>::new(vec![vec![0.5, 0.5], vec![1.0]]),
            Err(TmdpError::Dimension(_))
        ));
    }

    #[test]
    fn joint_update_examples() {
        let belief = BeliefTable::new(vec![vec![0.6, 0.4], vec![0.6, 0.4]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q0 = JointQTable::<f64>::random(&mut rng, 2, 2, 2, 3.0);

        let mut q = q0.clone();
        q_update_joint(&mut q, 0, 1, 0, 2.0, 1, &belief, &params(0.0, 0.9)).unwrap();
        assert_eq!(q, q0);

        let mut q = q0.clone();
        q_update_joint(&mut q, 0, 1, 0, -3.0, 1, &belief, &params(1.0, 0.0)).unwrap();
        assert_eq!(q.get(0, 1, 0), -3.0);

        // Q ≡ 0 except Q(s', a1, b1) = 10, belief(b1|s') = 0.4
        let mut q = JointQTable::<f64>::new(2, 2, 2);
        q.set(1, 1, 1, 10.0);
        q_update_joint(&mut q, 0, 0, 0, 0.0, 1, &belief, &params(0.5, 0.5)).unwrap();
        assert_abs_diff_eq!(q.get(0, 0, 0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn joint_update_rejects_unnormalized_next_row() {
        let mut q = JointQTable::<f64>::new(1, 2, 2);
        let bad = [0.7, 0.7];
        let r = q_update_joint_row(&mut q, 0, 0, 0, 1.0, 0, &bad[..1], &params(0.5, 0.5));
        assert!(matches!(r, Err(TmdpError::Dimension(_))));
    }

    #[test]
    fn point_mass_belief_degenerates_to_fixed_opponent_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let q0 = JointQTable::<f64>::random(&mut rng, 3, 3, 2, 4.0);
        let belief = BeliefTable::point_mass(3, 2, 1);
        let p = params(0.3, 0.9);
        let mut q = q0.clone();
        q_update_joint(&mut q, 2, 0, 1, 1.5, 1, &belief, &p).unwrap();
        let best = (0..3).map(|a| q0.get(1, a, 1)).fold(f64::NEG_INFINITY, f64::max);
        let expect = 0.7 * q0.get(2, 0, 1) + 0.3 * (1.5 + 0.9 * best);
        assert_abs_diff_eq!(q.get(2, 0, 1), expect, epsilon = 1e-12);
    }

    fn single_state_spec(r: f64) -> TmdpSpec<f64> {
        TmdpSpec::new(1, 2, 2, vec![1.0; 4], vec![r; 4]).unwrap()
    }

    #[test]
    fn operator_h_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = TmdpSpec::<f64>::random(&mut rng, 3, 2, 2, 1.0);
        let belief = BeliefTable::random(&mut rng, 3, 2);
        let q = JointQTable::random(&mut rng, 3, 2, 2, 10.0);
        let h = apply_operator_h(&q, &spec, &belief, 0.0).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                for b in 0..2 {
                    assert_abs_diff_eq!(h.get(s, a, b), spec.reward(s, a, b), epsilon = 1e-12);
                }
            }
        }

        let spec = single_state_spec(0.0);
        let q = JointQTable::filled(1, 2, 2, 3.0);
        let h = apply_operator_h(&q, &spec, &BeliefTable::uniform(1, 2), 0.7).unwrap();
        assert!(h.values().iter().all(|&v| (v - 2.1).abs() < 1e-12));
    }

    #[test]
    fn operator_hbar_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = TmdpSpec::<f64>::random(&mut rng, 3, 2, 3, 1.0);
        let belief = BeliefTable::point_mass(3, 3, 2);
        let q = QTable::random(&mut rng, 3, 2, 10.0);
        let h = apply_operator_hbar(&q, &spec, &belief, 0.0).unwrap();
        for s in 0..3 {
            for a in 0..2 {
                let expect: f64 = spec.transition(s, a, 2).iter().map(|p| p * spec.reward(s, a, 2)).sum();
                assert_abs_diff_eq!(h.get(s, a), expect, epsilon = 1e-12);
            }
        }

        let spec = single_state_spec(0.0);
        let q = QTable::filled(1, 2, -4.0);
        let h = apply_operator_hbar(&q, &spec, &BeliefTable::uniform(1, 2), 0.25).unwrap();
        assert!(h.values().iter().all(|&v| (v + 1.0).abs() < 1e-12));
    }

    #[test]
    fn operators_reject_mismatched_dimensions() {
        let spec = single_state_spec(1.0);
        let q = JointQTable::<f64>::new(2, 2, 2);
        assert!(matches!(
            apply_operator_h(&q, &spec, &BeliefTable::uniform(1, 2), 0.5),
            Err(TmdpError::Dimension(_))
        ));
        let qbar = QTable::<f64>::new(1, 3);
        assert!(apply_operator_hbar(&qbar, &spec, &BeliefTable::uniform(1, 2), 0.5).is_err());
        let q = JointQTable::<f64>::new(1, 2, 2);
        assert!(apply_operator_h(&q, &spec, &BeliefTable::uniform(1, 3), 0.5).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        let fp = fixed_point_iterate(
            |q: &QTable<f64>| Ok(QTable::from_fn(2, 2, |s, a| 0.5 * q.get(s, a))),
            QTable::filled(2, 2, 1.0),
            1e-9,
            200,
        )
        .unwrap();
        assert!(fp.value.values().iter().all(|v| v.abs() < 1e-8));

        // r ≡ 1, γ = 0.5: fixed point 1 / (1 − γ) = 2
        let spec = single_state_spec(1.0);
        let belief = BeliefTable::uniform(1, 2);
        let fp = fixed_point_iterate(
            |q| apply_operator_h(q, &spec, &belief, 0.5),
            JointQTable::new(1, 2, 2),
            1e-12,
            500,
        )
        .unwrap();
        assert!(fp.value.values().iter().all(|v| (v - 2.0).abs() < 1e-11));

        let err = fixed_point_iterate(
            |q: &QTable<f64>| Ok(QTable::from_fn(1, 1, |_, _| q.get(0, 0) + 1.0)),
            QTable::new(1, 1),
            1e-6,
            10,
        )
        .unwrap_err();
        match err {
            TmdpError::NonConvergence { iterations, residual } => {
                assert_eq!(iterations, 10);
                assert_eq!(residual, 1.0);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(fixed_point_iterate(|q: &QTable<f64>| Ok(q.clone()), QTable::new(1, 1), 0.0, 10).is_err());
    }

    #[test]
    fn f32_tables_work_too() {
        let mut q = QTable::<f32>::new(2, 2);
        let p = LearningParams::new(0.5f32, 0.9, 0.0).unwrap();
        q_update_independent(&mut q, 0, 0, 1.0, 1, &p).unwrap();
        assert_eq!(q.get(0, 0), 0.5);
        let spec = TmdpSpec::<f32>::new(1, 1, 1, vec![1.0], vec![1.0]).unwrap();
        let fp = fixed_point_iterate(
            |q| apply_operator_h(q, &spec, &BeliefTable::uniform(1, 1), 0.5),
            JointQTable::new(1, 1, 1),
            1e-5,
            100,
        )
        .unwrap();
        assert!((fp.value.get(0, 0, 0) - 2.0).abs() < 1e-4);
    }
}
