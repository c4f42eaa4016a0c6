use crate::beliefs::DirichletBelief;
use crate::error::{check_index, invalid, Result, TmdpError};
use crate::scalar::Scalar;

/// Fixed-weight mixture of three first-order conditionals:
/// `w1 p(b | a_prev) + w2 p(b | b_prev) + w3 p(b | s)`.
///
/// The first two families carry one extra context for "no previous action".
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMixtureModel<S> {
    weights: [S; 3],
    by_prev_own: Vec<DirichletBelief<S>>,
    by_prev_opp: Vec<DirichletBelief<S>>,
    by_state: Vec<DirichletBelief<S>>,
}

impl<S: Scalar> MarkovMixtureModel<S> {
    pub fn new(
        weights: [S; 3],
        n_states: usize,
        n_own_actions: usize,
        n_opp_actions: usize,
        prior: S,
        forget_lambda: S,
    ) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= S::zero())) {
            return Err(invalid("mixture.weights", "must be nonnegative"));
        }
        let total: S = weights.iter().copied().sum();
        if (total - S::one()).abs() > S::dist_tol() {
            return Err(invalid("mixture.weights", format!("sum to {total}, expected 1")));
        }
        let fresh = DirichletBelief::symmetric(n_opp_actions, prior, forget_lambda)?;
        Ok(Self {
            weights,
            by_prev_own: vec![fresh.clone(); n_own_actions + 1],
            by_prev_opp: vec![fresh.clone(); n_opp_actions + 1],
            by_state: vec![fresh; n_states],
        })
    }

    pub fn weights(&self) -> [S; 3] {
        self.weights
    }

    fn own_ctx(&self, prev: Option<usize>) -> Result<usize> {
        let none = self.by_prev_own.len() - 1;
        match prev {
            Some(a) => check_index("previous own action", a, none).map(|_| a),
            None => Ok(none),
        }
    }

    fn opp_ctx(&self, prev: Option<usize>) -> Result<usize> {
        let none = self.by_prev_opp.len() - 1;
        match prev {
            Some(b) => check_index("previous opponent action", b, none).map(|_| b),
            None => Ok(none),
        }
    }

    pub fn component(&self, which: usize, prev_a: Option<usize>, prev_b: Option<usize>, s: usize) -> Result<&DirichletBelief<S>> {
        match which {
            0 => Ok(&self.by_prev_own[self.own_ctx(prev_a)?]),
            1 => Ok(&self.by_prev_opp[self.opp_ctx(prev_b)?]),
            2 => {
                check_index("state", s, self.by_state.len())?;
                Ok(&self.by_state[s])
            }
            _ => Err(TmdpError::Dimension(format!("mixture has 3 components, asked for {which}"))),
        }
    }

    /// Record that the opponent played `b` in context `(prev_a, prev_b, s)`.
    pub fn observe(&mut self, prev_a: Option<usize>, prev_b: Option<usize>, s: usize, b: usize) -> Result<()> {
        let ia = self.own_ctx(prev_a)?;
        let ib = self.opp_ctx(prev_b)?;
        check_index("state", s, self.by_state.len())?;
        self.by_prev_own[ia].update(b)?;
        self.by_prev_opp[ib].update(b)?;
        self.by_state[s].update(b)
    }

    pub fn mixture_predictive(&self, prev_a: Option<usize>, prev_b: Option<usize>, s: usize) -> Result<Vec<S>> {
        self.own_ctx(prev_a)?;
        self.opp_ctx(prev_b)?;
        check_index("state", s, self.by_state.len())?;
        let mut out = vec![S::zero(); self.by_state.first().map_or(0, DirichletBelief::len)];
        for (k, &w) in self.weights.iter().enumerate() {
            if w == S::zero() {
                continue;
            }
            let p = self.component(k, prev_a, prev_b, s)?.predictive()?;
            for (o, x) in out.iter_mut().zip(p) {
                *o += w * x;
            }
        }
        Ok(out)
    }

    pub(crate) fn to_entries(&self) -> Vec<(String, String)> {
        let w: Vec<String> = self.weights.iter().map(|w| w.as_f64().to_string()).collect();
        let mut out = vec![("weights".to_string(), w.join(","))];
        for (name, fam) in [("prev_own", &self.by_prev_own), ("prev_opp", &self.by_prev_opp), ("state", &self.by_state)] {
            out.push((format!("{name}.len"), fam.len().to_string()));
            for (i, d) in fam.iter().enumerate() {
                out.push((format!("{name}.{i}"), d.encode()));
            }
        }
        out
    }

    pub(crate) fn from_entries(kv: &crate::snapshot::KeyValues) -> Result<Self> {
        let w = crate::snapshot::parse_reals::<S>(kv.get("weights")?)?;
        let weights: [S; 3] = w
            .try_into()
            .map_err(|_| TmdpError::Snapshot("mixture needs exactly 3 weights".into()))?;
        let family = |name: &str| -> Result<Vec<DirichletBelief<S>>> {
            let n: usize = kv.value(&format!("{name}.len"))?;
            (0..n).map(|i| DirichletBelief::decode(kv.get(&format!("{name}.{i}"))?)).collect()
        };
        let by_prev_own = family("prev_own")?;
        let by_prev_opp = family("prev_opp")?;
        let by_state = family("state")?;
        if by_prev_own.is_empty() || by_prev_opp.is_empty() {
            return Err(TmdpError::Snapshot("mixture families must be nonempty".into()));
        }
        let total: S = weights.iter().copied().sum();
        if (total - S::one()).abs() > S::dist_tol() {
            return Err(TmdpError::Snapshot("mixture weights do not sum to 1".into()));
        }
        Ok(Self {
            weights,
            by_prev_own,
            by_prev_opp,
            by_state,
        })
    }
}
