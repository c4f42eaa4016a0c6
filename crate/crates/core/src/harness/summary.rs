use std::path::Path;

use crate::error::{invalid, Result, TmdpError};
use crate::harness::EpisodeLog;

pub const CSV_HEADER: [&str; 6] = ["step", "seed", "r_dm", "r_opp", "ma_r_dm", "ma_r_opp"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Series {
    pub r_dm: Vec<f64>,
    pub r_opp: Vec<f64>,
    pub ma_r_dm: Vec<f64>,
    pub ma_r_opp: Vec<f64>,
}

impl Series {
    pub fn len(&self) -> usize {
        self.r_dm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_dm.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub window: usize,
    pub seeds: Vec<(u64, Series)>,
    /// Pointwise mean over seeds of every column.
    pub mean: Series,
}

/// Trailing mean over up to `window` values.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut sum = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        sum += x;
        if i >= window {
            sum -= xs[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

fn pointwise_mean<'a>(cols: impl Iterator<Item = &'a Vec<f64>>, n: usize, len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for c in cols {
        for (a, x) in acc.iter_mut().zip(c) {
            *a += x;
        }
    }
    acc.iter().map(|a| a / n as f64).collect()
}

pub fn aggregate_runs(logs: &[EpisodeLog], window: usize) -> Result<RunSummary> {
    if logs.is_empty() {
        return Err(invalid("logs", "nothing to aggregate"));
    }
    if window == 0 {
        return Err(invalid("window", "must be positive"));
    }
    let len = logs[0].records.len();
    if let Some(bad) = logs.iter().find(|l| l.records.len() != len) {
        return Err(TmdpError::Dimension(format!(
            "seed {} has {} rounds, seed {} has {len}",
            bad.seed,
            bad.records.len(),
            logs[0].seed
        )));
    }
    let seeds: Vec<(u64, Series)> = logs
        .iter()
        .map(|l| {
            let (r_dm, r_opp) = (l.rewards_dm(), l.rewards_opp());
            let series = Series {
                ma_r_dm: moving_average(&r_dm, window),
                ma_r_opp: moving_average(&r_opp, window),
                r_dm,
                r_opp,
            };
            (l.seed, series)
        })
        .collect();
    let n = seeds.len();
    let mean = Series {
        r_dm: pointwise_mean(seeds.iter().map(|s| &s.1.r_dm), n, len),
        r_opp: pointwise_mean(seeds.iter().map(|s| &s.1.r_opp), n, len),
        ma_r_dm: pointwise_mean(seeds.iter().map(|s| &s.1.ma_r_dm), n, len),
        ma_r_opp: pointwise_mean(seeds.iter().map(|s| &s.1.ma_r_opp), n, len),
    };
    Ok(RunSummary { window, seeds, mean })
}

impl RunSummary {
    /// Cross-seed mean reward of each side over the last `window` rounds.
    pub fn final_window_mean(&self, window: usize) -> (f64, f64) {
        let tail = |xs: &[f64]| {
            let w = window.clamp(1, xs.len().max(1));
            let t = &xs[xs.len().saturating_sub(w)..];
            if t.is_empty() {
                f64::NAN
            } else {
                t.iter().sum::<f64>() / t.len() as f64
            }
        };
        (tail(&self.mean.r_dm), tail(&self.mean.r_opp))
    }

    /// Per-seed means of each side over the last `window` rounds.
    pub fn final_window_by_seed(&self, window: usize) -> Vec<(u64, f64, f64)> {
        self.seeds
            .iter()
            .map(|(seed, s)| {
                let w = window.clamp(1, s.len().max(1));
                let k = s.len().saturating_sub(w);
                let n = (s.len() - k) as f64;
                (
                    *seed,
                    s.r_dm[k..].iter().sum::<f64>() / n,
                    s.r_opp[k..].iter().sum::<f64>() / n,
                )
            })
            .collect()
    }
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> TmdpError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => TmdpError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => TmdpError::Config(format!("{}: {other:?}", path.display())),
    }
}

/// Per-seed rows in seed order, then the mean rows with seed `mean`.
/// Reals use the shortest text that parses back to the same value.
pub fn write_csv(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    w.write_record(CSV_HEADER).map_err(io_err(path))?;
    let mut row = |step: usize, seed: &str, s: &Series| {
        w.write_record([
            step.to_string(),
            seed.to_string(),
            s.r_dm[step].to_string(),
            s.r_opp[step].to_string(),
            s.ma_r_dm[step].to_string(),
            s.ma_r_opp[step].to_string(),
        ])
    };
    for (seed, s) in &summary.seeds {
        let seed = seed.to_string();
        for step in 0..s.len() {
            row(step, &seed, s).map_err(io_err(path))?;
        }
    }
    if !summary.seeds.is_empty() {
        for step in 0..summary.mean.len() {
            row(step, "mean", &summary.mean).map_err(io_err(path))?;
        }
    }
    w.flush().map_err(|source| TmdpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub step: usize,
    /// `None` for the mean rows.
    pub seed: Option<u64>,
    pub r_dm: f64,
    pub r_opp: f64,
    pub ma_r_dm: f64,
    pub ma_r_opp: f64,
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(io_err(path))?;
    let header = r.headers().map_err(io_err(path))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(TmdpError::Config(format!("{}: unexpected header {header:?}", path.display())));
    }
    let bad = |what: &str, v: &str| TmdpError::Config(format!("{}: bad {what} `{v}`", path.display()));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io_err(path))?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i], &rec[i]));
        out.push(CsvRow {
            step: rec[0].parse().map_err(|_| bad("step", &rec[0]))?,
            seed: match &rec[1] {
                "mean" => None,
                s => Some(s.parse().map_err(|_| bad("seed", s))?),
            },
            r_dm: num(2)?,
            r_opp: num(3)?,
            ma_r_dm: num(4)?,
            ma_r_opp: num(5)?,
        });
    }
    Ok(out)
}
