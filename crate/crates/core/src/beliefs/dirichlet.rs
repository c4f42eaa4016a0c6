use crate::error::{check_index, invalid, Result, TmdpError};
use crate::scalar::Scalar;

/// Dirichlet pseudocounts over opponent actions.
///
/// The vector holds prior pseudocounts and observed counts merged, stored as
/// reals because reweighting by the forget factor makes them fractional.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletBelief<S> {
    pseudocounts: Vec<S>,
    forget_lambda: S,
}

impl<S: Scalar> DirichletBelief<S> {
    pub fn new(pseudocounts: Vec<S>, forget_lambda: S) -> Result<Self> {
        if pseudocounts.is_empty() {
            return Err(invalid("pseudocounts", "empty"));
        }
        if pseudocounts.iter().any(|&c| !(c >= S::zero()) || !c.is_finite()) {
            return Err(invalid("pseudocounts", format!("{pseudocounts:?} has a negative entry")));
        }
        if !pseudocounts.iter().any(|&c| c > S::zero()) {
            return Err(invalid("pseudocounts", "all zero"));
        }
        if !(forget_lambda > S::zero() && forget_lambda <= S::one()) {
            return Err(invalid("forget_lambda", format!("{forget_lambda} not in (0, 1]")));
        }
        Ok(Self {
            pseudocounts,
            forget_lambda,
        })
    }

    /// Symmetric prior: every action starts at `prior`.
    pub fn symmetric(n: usize, prior: S, forget_lambda: S) -> Result<Self> {
        Self::new(vec![prior; n], forget_lambda)
    }

    /// `Dir(1, …, 1)` without forgetting.
    pub fn uniform(n: usize) -> Self {
        Self::symmetric(n, S::one(), S::one()).expect("uniform prior is valid")
    }

    pub fn pseudocounts(&self) -> &[S] {
        &self.pseudocounts
    }

    pub fn forget_lambda(&self) -> S {
        self.forget_lambda
    }

    pub fn len(&self) -> usize {
        self.pseudocounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pseudocounts.is_empty()
    }

    pub fn total(&self) -> S {
        self.pseudocounts.iter().copied().sum()
    }

    /// Conjugate update: add one to the observed action.
    pub fn observe(&mut self, action: usize) -> Result<()> {
        check_index("opponent action", action, self.pseudocounts.len())?;
        self.pseudocounts[action] += S::one();
        Ok(())
    }

    /// Reweight every pseudocount by λ, then add one to the observed action.
    pub fn forget_observe(&mut self, action: usize) -> Result<()> {
        check_index("opponent action", action, self.pseudocounts.len())?;
        let lambda = self.forget_lambda;
        for c in &mut self.pseudocounts {
            *c *= lambda;
        }
        self.pseudocounts[action] += S::one();
        Ok(())
    }

    /// [`forget_observe`](Self::forget_observe) when λ < 1, else [`observe`](Self::observe).
    pub fn update(&mut self, action: usize) -> Result<()> {
        if self.forget_lambda < S::one() {
            self.forget_observe(action)
        } else {
            self.observe(action)
        }
    }

    /// Posterior mean: pseudocounts normalized.
    pub fn predictive(&self) -> Result<Vec<S>> {
        let mut out = vec![S::zero(); self.pseudocounts.len()];
        self.predictive_into(&mut out)?;
        Ok(out)
    }

    pub fn predictive_into(&self, out: &mut [S]) -> Result<()> {
        let total = self.total();
        if !(total > S::zero()) {
            return Err(TmdpError::NotNormalized("all pseudocounts are zero".into()));
        }
        for (o, &c) in out.iter_mut().zip(&self.pseudocounts) {
            *o = c / total;
        }
        Ok(())
    }

    /// Compact `λ;c0,c1,…` form used inside snapshots.
    pub(crate) fn encode(&self) -> String {
        let counts: Vec<String> = self.pseudocounts.iter().map(|c| c.as_f64().to_string()).collect();
        format!("{};{}", self.forget_lambda.as_f64(), counts.join(","))
    }

    pub(crate) fn decode(text: &str) -> Result<Self> {
        let (lambda, counts) = text
            .split_once(';')
            .ok_or_else(|| TmdpError::Snapshot(format!("bad dirichlet entry `{text}`")))?;
        Self::new(crate::snapshot::parse_reals(counts)?, crate::snapshot::parse_real(lambda)?)
    }
}
