//! Declarative experiment runner: configs in, seeded logs, cross-seed
//! summaries and CSV out.
//!
//! Every seed gets fresh agents and a fresh environment. The decision
//! maker draws from ChaCha8 keyed by the seed on stream 1, the opponent on
//! stream 2, so a seed's trace does not depend on which other seeds run.

mod config;
pub mod presets;
mod run;
mod summary;

pub use config::{apply_override, merge_tables, resolve_config, ExperimentConfig};
pub use run::{agent_rng, run_experiment, run_seed, EpisodeLog, RoundRecord, RunMeta, DM_STREAM, OPP_STREAM};
pub use summary::{aggregate_runs, moving_average, read_csv, write_csv, CsvRow, RunSummary, Series, CSV_HEADER};
