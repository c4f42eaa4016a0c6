use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tmdp_core::harness::{aggregate_runs, presets, resolve_config, run_experiment, write_csv, ExperimentConfig};
use tmdp_core::verify::{run_verify, VerifyOptions};
use tmdp_core::TmdpError;

#[derive(Parser)]
#[command(name = "tmdp-lab", version, about = "Run TMDP learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV.
    Run(RunArgs),
    /// Run an experiment once per point of a parameter grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Grid axis as key=v1,v2,...; repeat for a product grid.
        #[arg(long = "grid", value_name = "KEY=V1,V2", required = true)]
        grid: Vec<String>,
    },
    /// Check the operator and belief properties.
    Verify {
        #[arg(long, env = "TMDP_LAB_SEED", default_value_t = VerifyOptions::default().master_seed)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_gamma: Option<f64>,
    },
    /// List the bundled presets.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Preset name.
    #[arg(value_name = "PRESET", conflicts_with = "preset_flag")]
    preset: Option<String>,
    #[arg(long = "preset", value_name = "NAME")]
    preset_flag: Option<String>,
    /// TOML config, layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted override such as agent_a.alpha=0.3.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seeds as a list (1,4,9) or a half-open range (0..10).
    #[arg(long)]
    seeds: Option<String>,
    /// First seed when --seeds is absent.
    #[arg(long, env = "TMDP_LAB_SEED", hide_env_values = true)]
    master_seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
    Verify,
}

impl From<TmdpError> for Failure {
    fn from(e: TmdpError) -> Self {
        match e {
            TmdpError::Config(_) | TmdpError::InvalidParameter { .. } => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Config(format!("--seeds: cannot parse `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo >= hi {
            return Err(bad());
        }
        return Ok((lo..hi).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

impl RunArgs {
    fn resolve(&self, extra: &[String]) -> Result<ExperimentConfig, Failure> {
        let preset = self.preset.as_deref().or(self.preset_flag.as_deref());
        let mut overrides = self.set.clone();
        overrides.extend_from_slice(extra);
        match (&self.seeds, self.master_seed) {
            (Some(s), _) => {
                let list: Vec<String> = parse_seeds(s)?.iter().map(u64::to_string).collect();
                overrides.push(format!("seed_list=[{}]", list.join(",")));
            }
            (None, Some(seed)) => overrides.push(format!("seed={seed}")),
            (None, None) => {}
        }
        resolve_config(preset, self.config.as_deref(), &overrides).map_err(|e| match e {
            TmdpError::Io { .. } => Failure::Config(e.to_string()),
            e => e.into(),
        })
    }
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))
}

/// Runs `cfg`, writes `<out>/<stem>.csv` and the resolved config, and
/// returns the final-window means.
fn execute(cfg: &ExperimentConfig, out: &Path, stem: &str, quiet: bool) -> Result<(f64, f64), Failure> {
    if !quiet {
        eprintln!("running {stem}: {} seeds x {} {}", cfg.seed_list().len(), cfg.rounds(), cfg.round_unit());
    }
    let logs = run_experiment(cfg)?;
    let summary = aggregate_runs(&logs, cfg.window)?;
    create_dir(out)?;
    let csv = out.join(format!("{stem}.csv"));
    write_csv(&summary, &csv)?;
    let toml = out.join(format!("{stem}.toml"));
    std::fs::write(&toml, cfg.to_toml()).map_err(|e| Failure::Runtime(format!("{}: {e}", toml.display())))?;
    if cfg.checkpoints {
        for log in &logs {
            if let Some([dm, opp]) = &log.checkpoints {
                for (who, text) in [("dm", dm), ("opp", opp)] {
                    let path = out.join(format!("{stem}.seed{}.{who}.snap", log.seed));
                    std::fs::write(&path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                }
            }
        }
    }
    if !quiet {
        eprintln!("wrote {}", csv.display());
    }
    Ok(summary.final_window_mean(cfg.eval_window()))
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.resolve(&[])?;
    let out = cfg.output.clone().unwrap_or_else(|| args.out.clone());
    let (dm, opp) = execute(&cfg, &out, &cfg.name, args.quiet)?;
    println!("{}: final {} {} mean over {} seeds", cfg.name, cfg.eval_window(), cfg.round_unit(), cfg.seed_list().len());
    println!("  dm        {dm:.4}");
    println!("  opponent  {opp:.4}");
    Ok(())
}

fn sweep(args: &RunArgs, grid: &[String]) -> Result<(), Failure> {
    let mut axes = Vec::new();
    for g in grid {
        let (key, values) = g
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--grid `{g}` is not key=v1,v2")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(Failure::Config(format!("--grid `{g}` has an empty value")));
        }
        axes.push((key.trim().to_string(), values));
    }
    let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push((key.clone(), v.clone()));
                    p
                })
            })
            .collect();
    }
    let configs = points
        .iter()
        .map(|p| {
            let sets: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            args.resolve(&sets).map(|cfg| (sets, cfg))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (sets, cfg) in &configs {
        let out = cfg.output.clone().unwrap_or_else(|| args.out.clone());
        let stem = format!("{}__{}", cfg.name, sets.join("__").replace(['/', ' '], "_"));
        let (dm, opp) = execute(cfg, &out, &stem, args.quiet)?;
        println!("{}\tdm {dm:.4}\topponent {opp:.4}", sets.join(" "));
    }
    Ok(())
}

fn verify(seed: u64, inject_gamma: Option<f64>) -> Result<(), Failure> {
    let report = run_verify(&VerifyOptions {
        master_seed: seed,
        gamma_override: inject_gamma,
        ..VerifyOptions::default()
    });
    print!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Sweep { run, grid } => sweep(run, grid),
        Command::Verify { seed, inject_gamma } => verify(*seed, *inject_gamma),
        Command::ListPresets => {
            for name in presets::preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}
