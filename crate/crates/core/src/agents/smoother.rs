use crate::agents::Transition;
use crate::error::{check_index, invalid, Result};
use crate::scalar::{argmin, Scalar};

/// Exponentially smoothed frequency of the decision maker's choices.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherState<S> {
    p: Vec<S>,
    alpha: S,
}

impl<S: Scalar> SmootherState<S> {
    pub fn new(n_targets: usize, alpha: S) -> Result<Self> {
        if n_targets == 0 {
            return Err(invalid("targets", "need at least one"));
        }
        if !(alpha > S::zero() && alpha <= S::one()) {
            return Err(invalid("smoother_alpha", format!("{alpha} not in (0, 1]")));
        }
        Ok(Self {
            p: vec![S::one() / S::from_usize_lossy(n_targets); n_targets],
            alpha,
        })
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    /// `p := α p + (1 − α) onehot(choice)`.
    pub fn observe(&mut self, choice: usize) -> Result<()> {
        check_index("target", choice, self.p.len())?;
        let keep = S::one() - self.alpha;
        for (i, p) in self.p.iter_mut().enumerate() {
            *p = self.alpha * *p + if i == choice { keep } else { S::zero() };
        }
        Ok(())
    }

    /// The target the decision maker is judged least likely to pick.
    pub fn least_likely(&self) -> usize {
        argmin(&self.p).expect("nonempty")
    }
}

/// Adversary that places the decision maker's reward where it expects
/// the decision maker not to go.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherAdversary<S> {
    state: SmootherState<S>,
}

impl<S: Scalar> SmootherAdversary<S> {
    pub fn new(state: SmootherState<S>) -> Self {
        Self { state }
    }

    pub fn state(&self) -> &SmootherState<S> {
        &self.state
    }

    pub fn act(&self) -> usize {
        self.state.least_likely()
    }

    /// Learns only from steps where the environment reveals the decision
    /// maker's choice.
    pub fn observe(&mut self, t: &Transition<S>) -> Result<()> {
        match t.revealed {
            Some(choice) => self.state.observe(choice),
            None => Ok(()),
        }
    }
}
