use rand::SeedableRng;
use rayon::prelude::*;

use crate::agents::{build_agent, AgentConfig, AgentContext, AgentHandle, AgentRng, Decay, Observation, Side, Transition};
use crate::env::Environment;
use crate::error::Result;
use crate::harness::ExperimentConfig;

/// Stream of the decision maker's generator within a seed.
pub const DM_STREAM: u64 = 1;
/// Stream of the opponent's generator within a seed.
pub const OPP_STREAM: u64 = 2;

/// One round: a step of a repeated game or a whole episode. Rewards of an
/// episode are summed; `a` and `b` are the actions of its last step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub step: u64,
    /// State the round started in, decision maker's view.
    pub s: usize,
    pub a: usize,
    pub b: usize,
    pub r_dm: f64,
    pub r_opp: f64,
    /// Environment steps in the round.
    pub len: u32,
    /// Outermost exploration rates in force during the round.
    pub eps_dm: f64,
    pub eps_opp: f64,
}

/// Hyperparameters copied into every log.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub name: String,
    pub gamma: f64,
    pub alpha_dm: f64,
    pub epsilon_dm: f64,
    pub alpha_opp: f64,
    pub epsilon_opp: f64,
    pub rounds: u64,
    pub unit: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub seed: u64,
    pub meta: RunMeta,
    pub records: Vec<RoundRecord>,
    /// End-of-run snapshots of the two agents, when requested.
    pub checkpoints: Option<[String; 2]>,
}

impl EpisodeLog {
    pub fn rewards_dm(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.r_dm).collect()
    }

    pub fn rewards_opp(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.r_opp).collect()
    }
}

/// Generator for one agent: the seed selects the key, the seat the stream.
pub fn agent_rng(seed: u64, stream: u64) -> AgentRng {
    let mut rng = AgentRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Seat {
    agent: AgentHandle<f64>,
    stateless: bool,
    decays: Vec<Option<Decay>>,
}

impl Seat {
    fn new(cfg: &AgentConfig, env: &Environment, side: Side, gamma: f64, seed: u64) -> Result<Self> {
        let stateless = cfg.observation == Observation::Stateless;
        let (n_own, n_other, stream) = match side {
            Side::Dm => (env.n_dm_actions(), env.n_opp_actions(), DM_STREAM),
            Side::Opponent => (env.n_opp_actions(), env.n_dm_actions(), OPP_STREAM),
        };
        let ctx = AgentContext {
            n_states: if stateless { 1 } else { env.n_states() },
            n_own,
            n_other,
            side,
            n_dm_actions: env.n_dm_actions(),
            n_opp_actions: env.n_opp_actions(),
            gamma,
            rng: agent_rng(seed, stream),
        };
        Ok(Self {
            agent: build_agent(cfg, ctx)?,
            stateless,
            decays: cfg.decays(),
        })
    }

    fn view(&self, s: usize) -> usize {
        if self.stateless {
            0
        } else {
            s
        }
    }

    fn epsilon(&self) -> f64 {
        self.agent.exploration().first().copied().unwrap_or(0.0)
    }

    fn decay(&mut self, rounds_done: u64) {
        if self.decays.iter().all(Option::is_none) {
            return;
        }
        let mut eps = self.agent.exploration();
        for (e, d) in eps.iter_mut().zip(&self.decays) {
            if let Some(d) = d {
                if d.due(rounds_done) {
                    *e *= d.factor;
                }
            }
        }
        self.agent.set_exploration(&eps);
    }
}

/// Runs a single seed of `cfg` from scratch.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<EpisodeLog> {
    let mut env = cfg.env.build()?;
    let mut dm = Seat::new(&cfg.agent_a, &env, Side::Dm, cfg.gamma, seed)?;
    let mut opp = Seat::new(&cfg.agent_b, &env, Side::Opponent, cfg.gamma, seed)?;
    let rounds = cfg.rounds();
    let episodic = env.is_episodic();
    let commits = env.opponent_commits();
    let mut records = Vec::with_capacity(usize::try_from(rounds).unwrap_or(0));
    let mut s = env.env_reset();
    for round in 0..rounds {
        if episodic {
            s = env.env_reset();
        }
        let start = s;
        let (eps_dm, eps_opp) = (dm.epsilon(), opp.epsilon());
        let committed = if commits { Some(opp.agent.act(opp.view(s))?) } else { None };
        let (mut r_dm, mut r_opp, mut len) = (0.0, 0.0, 0u32);
        let (mut a, mut b);
        loop {
            a = dm.agent.act(dm.view(s))?;
            b = match committed {
                Some(b) => b,
                None => opp.agent.act(opp.view(s))?,
            };
            let out = env.step(a, b)?;
            let t = Transition {
                s: dm.view(s),
                a,
                b,
                reward: out.r_dm,
                opp_reward: out.r_opp,
                s_next: dm.view(out.s_next),
                terminal: out.terminal,
                revealed: out.revealed,
            };
            dm.agent.observe(&t)?;
            let t_opp = Transition {
                s: opp.view(s),
                s_next: opp.view(out.s_next),
                ..t.mirrored()
            };
            opp.agent.observe(&t_opp)?;
            r_dm += out.r_dm;
            r_opp += out.r_opp;
            len += 1;
            s = out.s_next;
            if !episodic || out.terminal {
                break;
            }
        }
        records.push(RoundRecord {
            step: round,
            s: start,
            a,
            b,
            r_dm,
            r_opp,
            len,
            eps_dm,
            eps_opp,
        });
        dm.decay(round + 1);
        opp.decay(round + 1);
    }
    let checkpoints = cfg
        .checkpoints
        .then(|| [dm.agent.checkpoint(), opp.agent.checkpoint()]);
    Ok(EpisodeLog {
        seed,
        meta: RunMeta {
            name: cfg.name.clone(),
            gamma: cfg.gamma,
            alpha_dm: cfg.agent_a.alpha,
            epsilon_dm: cfg.agent_a.epsilon,
            alpha_opp: cfg.agent_b.alpha,
            epsilon_opp: cfg.agent_b.epsilon,
            rounds,
            unit: cfg.round_unit(),
        },
        records,
        checkpoints,
    })
}

/// Runs every seed of `cfg`, in parallel, returning logs in seed-list order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<EpisodeLog>> {
    cfg.validate()?;
    cfg.seed_list().par_iter().map(|&seed| run_seed(cfg, seed)).collect()
}
