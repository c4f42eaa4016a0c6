//! Iterated bimatrix games and friend-or-foe worlds, as step functions over
//! joint actions. Rewards are `f64`; the decision maker plays rows.

mod foe;
mod matrix;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use foe::{
    foe_stateless_step, AdversaryReward, Cell, GridEpisode, GridStep, GridWorld, Move, DEFAULT_LAYOUT, TARGET_REWARD,
};
pub use matrix::{resolve_game, MatrixGame, Memory, Memory1State, PayoffBimatrix};

use crate::error::{invalid, Result, TmdpError};

/// Environment section of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvConfig {
    Matrix {
        /// `ipd`, `stag_hunt` or `chicken`.
        #[serde(default)]
        game: Option<String>,
        /// Explicit bimatrix: `payoffs[a][b] = [r_A, r_B]`.
        #[serde(default)]
        payoffs: Option<Vec<Vec<[f64; 2]>>>,
        #[serde(default)]
        memory: Memory,
    },
    FoeStateless {
        #[serde(default)]
        adversary_reward: AdversaryReward,
    },
    FoeGrid {
        /// Inline ASCII layout.
        #[serde(default)]
        map: Option<String>,
        #[serde(default)]
        map_file: Option<PathBuf>,
        #[serde(default)]
        adversary_reward: AdversaryReward,
        #[serde(default = "default_max_steps")]
        max_steps: u32,
        #[serde(default = "default_step_penalty")]
        step_penalty: f64,
        #[serde(default = "default_target_reward")]
        target_reward: f64,
    },
}

fn default_max_steps() -> u32 {
    50
}

fn default_step_penalty() -> f64 {
    1.0
}

fn default_target_reward() -> f64 {
    TARGET_REWARD
}

impl EnvConfig {
    /// Episodic environments count rounds in episodes.
    pub fn is_episodic(&self) -> bool {
        !matches!(self, Self::Matrix { .. })
    }

    pub fn build(&self) -> Result<Environment> {
        match self {
            Self::Matrix { game, payoffs, memory } => Ok(Environment::Matrix(MatrixGame::new(
                resolve_game(game.as_deref(), payoffs.as_ref())?,
                *memory,
            ))),
            Self::FoeStateless { adversary_reward } => Ok(Environment::FoeStateless {
                scaling: *adversary_reward,
            }),
            Self::FoeGrid {
                map,
                map_file,
                adversary_reward,
                max_steps,
                step_penalty,
                target_reward,
            } => {
                let mut world = match (map, map_file) {
                    (Some(_), Some(_)) => return Err(invalid("env.map", "give either `map` or `map_file`")),
                    (Some(m), None) => GridWorld::parse(m)?,
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path).map_err(|source| TmdpError::Io {
                            path: path.clone(),
                            source,
                        })?;
                        GridWorld::parse(&text)?
                    }
                    (None, None) => GridWorld::default_layout(),
                };
                if *max_steps == 0 {
                    return Err(invalid("env.max_steps", "must be positive"));
                }
                if !(step_penalty.is_finite() && *step_penalty >= 0.0) {
                    return Err(invalid("env.step_penalty", "must be finite and nonnegative"));
                }
                if !(target_reward.is_finite() && *target_reward > 0.0) {
                    return Err(invalid("env.target_reward", "must be finite and positive"));
                }
                world.max_steps = *max_steps;
                world.step_penalty = *step_penalty;
                world.target_reward = *target_reward;
                Ok(Environment::FoeGrid {
                    episode: GridEpisode::new(&world),
                    world,
                    scaling: *adversary_reward,
                })
            }
        }
    }
}

/// One environment step from the decision maker's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub s_next: usize,
    pub r_dm: f64,
    pub r_opp: f64,
    pub terminal: bool,
    /// The decision maker's target, once known.
    pub revealed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Matrix(MatrixGame),
    /// One-shot rounds: the decision maker picks a target, the adversary
    /// has hidden the reward in one.
    FoeStateless { scaling: AdversaryReward },
    /// The adversary's action is its target, fixed for the episode.
    FoeGrid {
        world: GridWorld,
        episode: GridEpisode,
        scaling: AdversaryReward,
    },
}

impl Environment {
    pub fn n_states(&self) -> usize {
        match self {
            Self::Matrix(g) => g.n_states(),
            Self::FoeStateless { .. } => 1,
            Self::FoeGrid { world, .. } => world.n_states(),
        }
    }

    pub fn n_dm_actions(&self) -> usize {
        match self {
            Self::Matrix(g) => g.payoffs().n_rows(),
            Self::FoeStateless { .. } => 2,
            Self::FoeGrid { .. } => 4,
        }
    }

    pub fn n_opp_actions(&self) -> usize {
        match self {
            Self::Matrix(g) => g.payoffs().n_cols(),
            Self::FoeStateless { .. } | Self::FoeGrid { .. } => 2,
        }
    }

    pub fn is_episodic(&self) -> bool {
        !matches!(self, Self::Matrix(_))
    }

    /// Whether the opponent moves once per episode rather than every step.
    pub fn opponent_commits(&self) -> bool {
        matches!(self, Self::FoeGrid { .. })
    }

    pub fn env_reset(&mut self) -> usize {
        match self {
            Self::Matrix(g) => g.reset(),
            Self::FoeStateless { .. } => 0,
            Self::FoeGrid { world, episode, .. } => {
                *episode = GridEpisode::new(world);
                episode.state(world)
            }
        }
    }

    pub fn step(&mut self, a: usize, b: usize) -> Result<StepOutcome> {
        match self {
            Self::Matrix(g) => {
                let (s_next, r_dm, r_opp) = g.step(a, b)?;
                Ok(StepOutcome {
                    s_next,
                    r_dm,
                    r_opp,
                    terminal: false,
                    revealed: None,
                })
            }
            Self::FoeStateless { scaling } => {
                let (r_dm, r_opp) = foe_stateless_step(b, a, *scaling)?;
                Ok(StepOutcome {
                    s_next: 0,
                    r_dm,
                    r_opp,
                    terminal: true,
                    revealed: Some(a),
                })
            }
            Self::FoeGrid { world, episode, scaling } => {
                let out = episode.grid_step(world, Move::from_index(a)?, b, *scaling)?;
                Ok(StepOutcome {
                    s_next: out.s_next,
                    r_dm: out.r_dm,
                    r_opp: out.r_opp,
                    terminal: out.terminal,
                    revealed: out.reached,
                })
            }
        }
    }
}
