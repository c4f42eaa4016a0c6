use serde::{Deserialize, Serialize};

use crate::agents::{
    AgentHandle, AgentRng, BeliefModel, FpqAgent, IndependentQAgent, Level2Agent, LevelKAgent, LevelNode,
    SmootherAdversary, SmootherState, TitForTat, WolfAgent, WolfParams,
};
use crate::beliefs::{BloomConditionalModel, BloomParams, MarkovMixtureModel};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::tmdp::{JointQTable, LearningParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "independent_q")]
    IndependentQ,
    #[serde(rename = "fpq")]
    Fpq,
    #[serde(rename = "level2")]
    Level2,
    #[serde(rename = "levelk")]
    LevelK,
    #[serde(rename = "wolf_phc")]
    WolfPhc,
    #[serde(rename = "tft")]
    Tft,
    #[serde(rename = "smoother")]
    Smoother,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::IndependentQ => "independent_q",
            Self::Fpq => "fpq",
            Self::Level2 => "level2",
            Self::LevelK => "levelk",
            Self::WolfPhc => "wolf_phc",
            Self::Tft => "tft",
            Self::Smoother => "smoother",
        }
    }
}

/// Seat at the table: the decision maker plays rows, the opponent columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Dm,
    Opponent,
}

/// What the agent sees of the environment state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    #[default]
    Full,
    /// Every state collapses to one.
    Stateless,
}

/// The reward a modeled counterpart is assumed to receive, as a function of
/// the modeling agent's own reward `r` and the counterpart's observed one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardModel {
    /// The reward the environment actually paid the counterpart.
    Observed,
    /// `−r`.
    #[default]
    ZeroSum,
    /// 1 when `r < 0`, else 0.
    Binary,
    /// 1 when `r < 0`, else −1.
    Sign,
}

impl RewardModel {
    pub fn apply<S: Scalar>(self, r: S, observed: S) -> S {
        let lost = r < S::zero();
        match self {
            Self::Observed => observed,
            Self::ZeroSum => -r,
            Self::Binary => if lost { S::one() } else { S::zero() },
            Self::Sign => if lost { S::one() } else { -S::one() },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Observed => "observed",
            Self::ZeroSum => "zero_sum",
            Self::Binary => "binary",
            Self::Sign => "sign",
        }
    }
}

/// Multiply ε by `factor` after every `every` rounds (steps in repeated
/// games, episodes in episodic ones).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decay {
    pub factor: f64,
    pub every: u64,
}

impl Decay {
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.factor > 0.0 && self.factor <= 1.0) {
            return Err(invalid(format!("{field}.factor"), format!("{} not in (0, 1]", self.factor)));
        }
        if self.every == 0 {
            return Err(invalid(format!("{field}.every"), "must be positive"));
        }
        Ok(())
    }

    /// Whether a decay is due once `rounds` rounds have completed.
    pub fn due(&self, rounds: u64) -> bool {
        rounds > 0 && rounds.is_multiple_of(self.every)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefKind {
    #[default]
    Dirichlet,
    Bloom,
    Mixture,
}

fn one() -> f64 {
    1.0
}

fn default_weights() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefConfig {
    #[serde(default)]
    pub kind: BeliefKind,
    /// Symmetric Dirichlet pseudocount.
    #[serde(default = "one")]
    pub prior: f64,
    #[serde(default = "one")]
    pub forget_lambda: f64,
    #[serde(default)]
    pub bloom_capacity: Option<usize>,
    #[serde(default)]
    pub bloom_hashes: Option<u32>,
    #[serde(default)]
    pub bloom_fp_rate: Option<f64>,
    /// Pseudocount added to every approximate count at query time.
    #[serde(default = "one")]
    pub bloom_prior: f64,
    #[serde(default = "default_weights")]
    pub mixture_weights: [f64; 3],
}

impl Default for BeliefConfig {
    fn default() -> Self {
        Self {
            kind: BeliefKind::Dirichlet,
            prior: 1.0,
            forget_lambda: 1.0,
            bloom_capacity: None,
            bloom_hashes: None,
            bloom_fp_rate: None,
            bloom_prior: 1.0,
            mixture_weights: default_weights(),
        }
    }
}

impl BeliefConfig {
    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.prior > 0.0) {
            return Err(invalid(format!("{field}.prior"), "must be positive"));
        }
        if !(self.forget_lambda > 0.0 && self.forget_lambda <= 1.0) {
            return Err(invalid(format!("{field}.forget_lambda"), format!("{} not in (0, 1]", self.forget_lambda)));
        }
        if self.kind == BeliefKind::Bloom {
            self.bloom_params().validate().map_err(|e| invalid(field, e.to_string()))?;
        }
        Ok(())
    }

    fn bloom_params(&self) -> BloomParams {
        let d = BloomParams::default();
        BloomParams {
            capacity: self.bloom_capacity.unwrap_or(d.capacity),
            hashes: self.bloom_hashes.unwrap_or(d.hashes),
            fp_rate: self.bloom_fp_rate.unwrap_or(d.fp_rate),
            seed: d.seed,
        }
    }

    pub fn build<S: Scalar>(&self, n_states: usize, n_own: usize, n_other: usize) -> Result<BeliefModel<S>> {
        match self.kind {
            BeliefKind::Dirichlet => {
                BeliefModel::dirichlet(n_states, n_other, S::lit(self.prior), S::lit(self.forget_lambda))
            }
            BeliefKind::Bloom => Ok(BeliefModel::Bloom(BloomConditionalModel::new(
                n_other,
                self.bloom_params(),
                S::lit(self.prior),
                S::lit(self.bloom_prior),
            )?)),
            BeliefKind::Mixture => Ok(BeliefModel::Mixture {
                model: MarkovMixtureModel::new(
                    self.mixture_weights.map(S::lit),
                    n_states,
                    n_own,
                    n_other,
                    S::lit(self.prior),
                    S::lit(self.forget_lambda),
                )?,
                prev: None,
            }),
        }
    }
}

fn default_alpha() -> f64 {
    0.1
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_level() -> usize {
    2
}

fn default_delta_win() -> f64 {
    0.05
}

fn default_delta_lose() -> f64 {
    0.2
}

fn default_smoother_alpha() -> f64 {
    0.8
}

/// One agent's section of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub kind: AgentKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Falls back to the experiment's γ.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub epsilon_decay: Option<Decay>,
    #[serde(default)]
    pub observation: Observation,
    #[serde(default)]
    pub belief: BeliefConfig,
    /// Learning rate of the modeled counterpart; falls back to `alpha`.
    #[serde(default)]
    pub opp_alpha: Option<f64>,
    /// Exploration of the modeled counterpart; falls back to `epsilon`.
    #[serde(default)]
    pub opp_epsilon: Option<f64>,
    #[serde(default)]
    pub opp_epsilon_decay: Option<Decay>,
    #[serde(default)]
    pub opp_reward: RewardModel,
    /// The modeled counterpart's belief about this agent.
    #[serde(default)]
    pub opp_belief: BeliefConfig,
    #[serde(default = "default_level")]
    pub level: usize,
    #[serde(default = "default_delta_win")]
    pub delta_win: f64,
    #[serde(default = "default_delta_lose")]
    pub delta_lose: f64,
    #[serde(default = "default_smoother_alpha")]
    pub smoother_alpha: f64,
    /// Initial value of every Q entry.
    #[serde(default)]
    pub init_q: f64,
}

impl AgentConfig {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            alpha: default_alpha(),
            epsilon: default_epsilon(),
            gamma: None,
            epsilon_decay: None,
            observation: Observation::Full,
            belief: BeliefConfig::default(),
            opp_alpha: None,
            opp_epsilon: None,
            opp_epsilon_decay: None,
            opp_reward: RewardModel::default(),
            opp_belief: BeliefConfig::default(),
            level: default_level(),
            delta_win: default_delta_win(),
            delta_lose: default_delta_lose(),
            smoother_alpha: default_smoother_alpha(),
            init_q: 0.0,
        }
    }

    pub fn opp_alpha(&self) -> f64 {
        self.opp_alpha.unwrap_or(self.alpha)
    }

    pub fn opp_epsilon(&self) -> f64 {
        self.opp_epsilon.unwrap_or(self.epsilon)
    }

    /// Decay rules per exploration level, outermost first, matching
    /// [`AgentHandle::exploration`].
    pub fn decays(&self) -> Vec<Option<Decay>> {
        match self.kind {
            AgentKind::IndependentQ | AgentKind::Fpq | AgentKind::WolfPhc => vec![self.epsilon_decay],
            AgentKind::Level2 => vec![self.epsilon_decay, self.opp_epsilon_decay],
            AgentKind::LevelK => (0..self.level)
                .map(|i| if i % 2 == 0 { self.epsilon_decay } else { self.opp_epsilon_decay })
                .collect(),
            AgentKind::Tft | AgentKind::Smoother => Vec::new(),
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        let rate = |name: &str, v: f64, lo_open: bool| -> Result<()> {
            let ok = if lo_open { v > 0.0 && v <= 1.0 } else { (0.0..=1.0).contains(&v) };
            if ok {
                Ok(())
            } else {
                let range = if lo_open { "(0, 1]" } else { "[0, 1]" };
                Err(invalid(format!("{field}.{name}"), format!("{v} not in {range}")))
            }
        };
        rate("alpha", self.alpha, true)?;
        rate("epsilon", self.epsilon, false)?;
        rate("opp_alpha", self.opp_alpha(), true)?;
        rate("opp_epsilon", self.opp_epsilon(), false)?;
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(invalid(format!("{field}.gamma"), format!("{g} not in [0, 1)")));
            }
        }
        if let Some(d) = &self.epsilon_decay {
            d.validate(&format!("{field}.epsilon_decay"))?;
        }
        if let Some(d) = &self.opp_epsilon_decay {
            d.validate(&format!("{field}.opp_epsilon_decay"))?;
        }
        self.belief.validate(&format!("{field}.belief"))?;
        self.opp_belief.validate(&format!("{field}.opp_belief"))?;
        if self.kind == AgentKind::LevelK && self.level < 1 {
            return Err(invalid(format!("{field}.level"), "must be at least 1"));
        }
        if self.kind == AgentKind::WolfPhc {
            WolfParams::new(self.delta_win, self.delta_lose).map_err(|e| invalid(field, e.to_string()))?;
        }
        if self.kind == AgentKind::Smoother && !(self.smoother_alpha > 0.0 && self.smoother_alpha < 1.0) {
            return Err(invalid(format!("{field}.smoother_alpha"), format!("{} not in (0, 1)", self.smoother_alpha)));
        }
        if !self.init_q.is_finite() {
            return Err(invalid(format!("{field}.init_q"), "must be finite"));
        }
        Ok(())
    }
}

/// What the environment tells an agent about its seat.
#[derive(Debug, Clone)]
pub struct AgentContext {
    /// States as the agent observes them.
    pub n_states: usize,
    pub n_own: usize,
    pub n_other: usize,
    pub side: Side,
    /// Action counts of the row and column player, for memory-1 decoding.
    pub n_dm_actions: usize,
    pub n_opp_actions: usize,
    /// Default discount.
    pub gamma: f64,
    pub rng: AgentRng,
}

pub fn build_agent<S: Scalar>(cfg: &AgentConfig, ctx: AgentContext) -> Result<AgentHandle<S>> {
    cfg.validate("agent")?;
    let gamma = S::lit(cfg.gamma.unwrap_or(ctx.gamma));
    let own = LearningParams::new(S::lit(cfg.alpha), gamma, S::lit(cfg.epsilon))?;
    let other = LearningParams::new(S::lit(cfg.opp_alpha()), gamma, S::lit(cfg.opp_epsilon()))?;
    let init = S::lit(cfg.init_q);
    let (ns, na, nb) = (ctx.n_states, ctx.n_own, ctx.n_other);
    Ok(match cfg.kind {
        AgentKind::IndependentQ => AgentHandle::IndependentQ(IndependentQAgent::with_table(
            crate::tmdp::QTable::filled(ns, na, init),
            own,
            ctx.rng,
        )),
        AgentKind::Fpq => AgentHandle::Fpq(FpqAgent::new(
            JointQTable::filled(ns, na, nb, init),
            cfg.belief.build(ns, na, nb)?,
            own,
            ctx.rng,
        )),
        AgentKind::Level2 => AgentHandle::Level2(Level2Agent::new(
            JointQTable::filled(ns, na, nb, init),
            JointQTable::filled(ns, nb, na, init),
            cfg.opp_belief.build(ns, nb, na)?,
            own,
            other,
            cfg.opp_reward,
            ctx.rng,
        )),
        AgentKind::LevelK => {
            let k = cfg.level;
            // Level i (1-based from the bottom) sits on this agent's side
            // when k − i is even.
            let same_side = |i: usize| (k - i).is_multiple_of(2);
            let mut node = if same_side(1) {
                LevelNode::basis(
                    JointQTable::filled(ns, na, nb, init),
                    own,
                    RewardModel::Observed,
                    cfg.belief.build(ns, na, nb)?,
                )
            } else {
                LevelNode::basis(
                    JointQTable::filled(ns, nb, na, init),
                    other,
                    cfg.opp_reward,
                    cfg.opp_belief.build(ns, nb, na)?,
                )
            };
            for i in 2..=k {
                node = if same_side(i) {
                    LevelNode::over(JointQTable::filled(ns, na, nb, init), own, RewardModel::Observed, node)?
                } else {
                    LevelNode::over(JointQTable::filled(ns, nb, na, init), other, cfg.opp_reward, node)?
                };
            }
            AgentHandle::LevelK(LevelKAgent::new(node, ctx.rng)?)
        }
        AgentKind::WolfPhc => AgentHandle::Wolf(WolfAgent::new(
            ns,
            na,
            own,
            WolfParams::new(S::lit(cfg.delta_win), S::lit(cfg.delta_lose))?,
            ctx.rng,
        )),
        AgentKind::Tft => AgentHandle::Tft(TitForTat::new(ctx.side, ctx.n_dm_actions, ctx.n_opp_actions)),
        AgentKind::Smoother => {
            AgentHandle::Smoother(SmootherAdversary::new(SmootherState::new(na, S::lit(cfg.smoother_alpha))?))
        }
    })
}
