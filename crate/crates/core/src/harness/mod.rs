//! Experiment driver: configs in, CSV files and plain-text summaries out.

pub mod config;
pub mod csvio;
pub mod fit;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenarios::{run, RunRecord};

pub use config::{Config, Experiment};
pub use fit::{fit_rate, RateFit};
pub use verify::{run_checks, Check, ClosedForms, VerifyGrids};

/// Environment variable overriding the output directory.
pub const OUTPUT_DIR_ENV: &str = "APPROACH_OUTPUT_DIR";

/// Rate fits skip checkpoints before this round.
pub const DEFAULT_T_MIN: usize = 100;

/// `$APPROACH_OUTPUT_DIR`, or `fallback`.
pub fn output_dir(fallback: &Path) -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| fallback.to_path_buf(), PathBuf::from)
}

pub fn run_config(config: &Config) -> Result<RunRecord> {
    let Experiment {
        scenario,
        mut player,
        adversary,
        options,
    } = config.build()?;
    run(&scenario, &mut player, &adversary, &options)
}

/// Output file of a config: `run.output`, or the config's file stem.
pub fn output_name(config: &Config, config_path: &Path) -> String {
    config.run.output.clone().unwrap_or_else(|| {
        let stem = config_path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        format!("{stem}.csv")
    })
}

/// Runs one config file and writes its CSV into `out_dir`.
pub fn run_file(config_path: &Path, out_dir: &Path) -> Result<(PathBuf, RunRecord)> {
    let config = Config::from_path(config_path)?;
    let record = run_config(&config)?;
    let path = out_dir.join(output_name(&config, config_path));
    csvio::save(&path, &record)?;
    Ok((path, record))
}

/// Runs every `*.toml` in `config_dir` concurrently; results in file-name order.
pub fn sweep(config_dir: &Path, out_dir: &Path) -> Result<Vec<(PathBuf, RunRecord)>> {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(config_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err(Error::InvalidInput(format!("no .toml configs in {}", config_dir.display())));
    }
    configs
        .par_iter()
        .map(|p| {
            run_file(p, out_dir).map_err(|e| match e {
                Error::Config { key, message } => Error::Config {
                    key,
                    message: format!("{}: {message}", p.display()),
                },
                other => other,
            })
        })
        .collect()
}

fn describe_fit(points: &[(usize, f64)]) -> String {
    let t_min = if points.iter().filter(|p| p.0 >= DEFAULT_T_MIN).count() >= fit::MIN_FIT_POINTS {
        DEFAULT_T_MIN
    } else {
        1
    };
    match fit_rate(points, t_min) {
        Ok(RateFit::Fit { slope, r_squared, .. }) => format!("slope {slope:+.3} (R² {r_squared:.3})"),
        Ok(RateFit::ConvergedToZero { first }) => format!("converged to zero by t={first}"),
        Err(_) => "too few checkpoints".into(),
    }
}

/// A short plain-text digest of one run.
pub fn summarize(record: &RunRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} | {} | {} | seed {} | T = {}",
        record.scenario, record.strategy, record.adversary, record.seed, record.horizon
    );
    let Some(last) = record.last() else {
        let _ = writeln!(s, "  no checkpoints");
        return s;
    };
    let fmt_vec = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    let _ = writeln!(s, "  final r̄ = ({}), m̄ parameters = ({})", fmt_vec(&last.r_bar), fmt_vec(&last.m_params));
    for (k, name) in record.metric_names.iter().enumerate() {
        let series: Vec<(usize, f64)> = record.rows.iter().map(|r| (r.t, r.distances[k])).collect();
        let peak = series.iter().map(|p| p.1).fold(0.0, f64::max);
        let _ = writeln!(
            s,
            "  {name}: final {:.4e}, max {:.4e}, {}",
            last.distances[k],
            peak,
            describe_fit(&series)
        );
    }
    if record.rows.iter().any(|r| r.gap.is_some()) {
        let violations = record
            .rows
            .iter()
            .filter(|r| matches!((r.gap, r.bound), (Some(g), Some(b)) if g > b))
            .count();
        let worst = record
            .rows
            .iter()
            .filter_map(|r| Some(r.gap? / r.bound?))
            .fold(0.0, f64::max);
        let _ = writeln!(s, "  certificate: {violations} violations, max gap/bound {worst:.3e}");
    }
    let delta: Vec<(usize, f64)> = record.rows.iter().map(|r| (r.t, r.delta_norm / r.t as f64)).collect();
    let _ = writeln!(s, "  ‖δ‖/t: final {:.4e}, {}", last.delta_norm / last.t as f64, describe_fit(&delta));
    if let Some(ng) = last.no_grouping {
        let _ = writeln!(s, "  no-grouping gap: final {ng:.4e}");
    }
    if !record.switch_rounds.is_empty() {
        let _ = writeln!(s, "  opponent switched at rounds {:?}", record.switch_rounds);
    }
    s
}

/// Rate fits for every metric of every file.
pub fn report(paths: &[PathBuf]) -> Result<String> {
    let mut s = String::new();
    for p in paths {
        let record = csvio::load(p)?;
        let _ = writeln!(s, "{}", p.display());
        s.push_str(&summarize(&record));
    }
    Ok(s)
}
