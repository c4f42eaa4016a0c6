use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::agents::{AgentConfig, AgentKind, Observation};
use crate::env::{EnvConfig, Memory};
use crate::error::{invalid, Result, TmdpError};
use crate::harness::presets;

fn default_seeds() -> usize {
    10
}

fn default_window() -> usize {
    100
}

/// A complete experiment: one environment, two agents, a horizon and the
/// seeds to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    /// Number of seeds, starting at `seed`.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// First seed of the run.
    #[serde(default)]
    pub seed: u64,
    /// Explicit seeds; overrides `seeds` and `seed`.
    #[serde(default)]
    pub seed_list: Option<Vec<u64>>,
    /// Default discount for both agents.
    pub gamma: f64,
    /// Horizon of repeated games.
    #[serde(default)]
    pub steps: Option<u64>,
    /// Horizon of episodic games.
    #[serde(default)]
    pub episodes: Option<u64>,
    /// Moving-average window, in rounds.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Final rounds averaged for the reported means; defaults to a tenth of
    /// the horizon.
    #[serde(default)]
    pub eval_window: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Keep end-of-run agent snapshots in the logs.
    #[serde(default)]
    pub checkpoints: bool,
    pub env: EnvConfig,
    /// The decision maker (row player).
    pub agent_a: AgentConfig,
    /// The opponent (column player).
    pub agent_b: AgentConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| TmdpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rounds in the run: steps of a repeated game or episodes.
    pub fn rounds(&self) -> u64 {
        self.steps.or(self.episodes).unwrap_or(0)
    }

    pub fn round_unit(&self) -> &'static str {
        if self.env.is_episodic() {
            "episodes"
        } else {
            "steps"
        }
    }

    pub fn eval_window(&self) -> usize {
        self.eval_window
            .unwrap_or_else(|| usize::try_from(self.rounds() / 10).unwrap_or(usize::MAX).max(1))
    }

    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seed_list {
            Some(list) => list.clone(),
            None => (0..self.seeds as u64).map(|i| self.seed + i).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must be nonempty"));
        }
        match &self.seed_list {
            Some(list) if list.is_empty() => return Err(invalid("seed_list", "must be nonempty")),
            None if self.seeds == 0 => return Err(invalid("seeds", "must be positive")),
            _ => {}
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid("gamma", format!("{} not in [0, 1)", self.gamma)));
        }
        let episodic = self.env.is_episodic();
        match (self.steps, self.episodes) {
            (Some(_), Some(_)) => return Err(invalid("steps", "give either `steps` or `episodes`")),
            (None, None) => {
                let field = if episodic { "episodes" } else { "steps" };
                return Err(invalid(field, "missing"));
            }
            (Some(_), None) if episodic => {
                return Err(invalid("steps", "episodic environment; use `episodes`"));
            }
            (None, Some(_)) if !episodic => {
                return Err(invalid("episodes", "repeated game; use `steps`"));
            }
            _ => {}
        }
        if self.rounds() == 0 {
            return Err(invalid(self.round_unit(), "must be positive"));
        }
        if self.window == 0 {
            return Err(invalid("window", "must be positive"));
        }
        if let Some(w) = self.eval_window {
            if w == 0 || w as u64 > self.rounds() {
                return Err(invalid("eval_window", format!("{w} not in [1, {}]", self.rounds())));
            }
        }
        self.agent_a.validate("agent_a")?;
        self.agent_b.validate("agent_b")?;
        self.env.build()?;
        let tft_ok = matches!(self.env, EnvConfig::Matrix { memory: Memory::Memory1, .. });
        let foe = self.env.is_episodic();
        for (field, agent) in [("agent_a", &self.agent_a), ("agent_b", &self.agent_b)] {
            if agent.kind == AgentKind::Tft && (!tft_ok || agent.observation == Observation::Stateless) {
                return Err(invalid(
                    format!("{field}.kind"),
                    "tft needs a memory-1 matrix environment with full observation",
                ));
            }
        }
        if self.agent_a.kind == AgentKind::Smoother {
            return Err(invalid("agent_a.kind", "the smoother only plays the adversary seat"));
        }
        if self.agent_b.kind == AgentKind::Smoother && !foe {
            return Err(invalid("agent_b.kind", "the smoother needs a friend-or-foe environment"));
        }
        Ok(())
    }
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Sets `a.b.c = value` inside `table`, creating intermediate tables.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| TmdpError::Config(format!("override `{assignment}` is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(TmdpError::Config(format!("override `{assignment}` has an empty key")));
    }
    let (last, path) = parts.split_last().expect("nonempty key");
    let mut cur = table;
    for (i, p) in path.iter().enumerate() {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| {
            TmdpError::Config(format!("override `{assignment}`: `{}` is not a section", parts[..=i].join(".")))
        })?;
    }
    cur.insert(last.to_string(), parse_value(raw));
    Ok(())
}

/// Recursively overlays `top` onto `base`.
pub fn merge_tables(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge_tables(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| TmdpError::Config(format!("{origin}: {e}")))
}

/// Builds a config from an optional preset, an optional file and dotted
/// overrides, later sources winning.
pub fn resolve_config(preset: Option<&str>, file: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut table = Table::new();
    if let Some(name) = preset {
        let text = presets::preset(name).ok_or_else(|| {
            TmdpError::Config(format!(
                "unknown preset `{name}`; available: {}",
                presets::preset_names().join(", ")
            ))
        })?;
        table = parse_table(text, name)?;
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|source| TmdpError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        merge_tables(&mut table, parse_table(&text, &path.display().to_string())?);
    }
    if preset.is_none() && file.is_none() {
        return Err(TmdpError::Config("need a preset or a config file".into()));
    }
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: ExperimentConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| TmdpError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
