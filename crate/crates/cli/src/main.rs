use std::path::{Path, PathBuf};
use std::process::ExitCode;

use approachability::harness::{self, csvio, ClosedForms, Config, VerifyGrids};
use approachability::scenarios::{run, Player};
use approachability::Error;
use clap::{Parser, Subcommand};

/// Approachability experiments: block strategy runs, target verification and rate reports.
#[derive(Debug, Parser)]
#[command(name = "approach", version)]
struct Cli {
    /// Output directory (overridden by APPROACH_OUTPUT_DIR).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one config and write its CSV.
    Run { config: PathBuf },
    /// Run every *.toml config in a directory in parallel.
    Sweep { config_dir: PathBuf },
    /// Compare the closed-form target functions with their oracles and write plot grids.
    VerifyTargets,
    /// Run a config with the known-game strategy and report the discrepancy rate.
    Blackwell { config: PathBuf },
    /// Rate fits for existing run CSVs.
    Report {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

fn write_summary(out: &Path, name: &str, text: &str) -> Result<(), Error> {
    csvio::write_atomic(&out.join(name), text.as_bytes())
}

fn execute(cli: Cli) -> Result<bool, Error> {
    let out = harness::output_dir(&cli.out);
    match cli.command {
        Command::Run { config } => {
            let (path, record) = harness::run_file(&config, &out)?;
            let summary = harness::summarize(&record);
            print!("{summary}");
            println!("wrote {}", path.display());
            write_summary(&out, &path.with_extension("txt").file_name().unwrap().to_string_lossy(), &summary)?;
            Ok(true)
        }
        Command::Sweep { config_dir } => {
            let results = harness::sweep(&config_dir, &out)?;
            let mut text = String::new();
            for (path, record) in &results {
                text.push_str(&format!("{}\n", path.display()));
                text.push_str(&harness::summarize(record));
            }
            print!("{text}");
            write_summary(&out, "summary.txt", &text)?;
            Ok(true)
        }
        Command::VerifyTargets => {
            let checks = harness::run_checks(&ClosedForms::default(), VerifyGrids::default(), Some(&out))?;
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format!("{c}\n"));
            }
            print!("{text}");
            write_summary(&out, "verify_targets.txt", &text)?;
            println!("wrote grids to {}", out.display());
            Ok(checks.iter().all(|c| c.passed()))
        }
        Command::Blackwell { config } => {
            let mut cfg = Config::from_path(&config)?;
            cfg.strategy = harness::config::StrategyConfig::Blackwell {};
            let experiment = cfg.build()?;
            let mut player = experiment.player;
            let record = run(&experiment.scenario, &mut player, &experiment.adversary, &experiment.options)?;
            let path = out.join(harness::output_name(&cfg, &config));
            csvio::save(&path, &record)?;
            let mut summary = harness::summarize(&record);
            if let Player::Blackwell(s) = &player {
                summary.push_str(&format!(
                    "  max inner-product excess {:.3e}, max game value gap {:.3e}\n",
                    s.max_excess(),
                    s.max_value_gap()
                ));
            }
            print!("{summary}");
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Report { csv } => {
            let text = harness::report(&csv)?;
            print!("{text}");
            write_summary(&out, "report.txt", &text)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
