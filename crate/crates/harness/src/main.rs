use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fsmcmc_harness::config::{ExperimentConfig, Format};
use fsmcmc_harness::{bundled, output, run_experiment, write_outputs, HarnessError};

#[derive(Parser)]
#[command(name = "fsmcmc", version, about = "Dimension-robust MCMC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration, or every bundled one with --all.
    Run {
        #[arg(short, long, required_unless_present = "all", conflicts_with = "all")]
        config: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        all: bool,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and check a configuration without running it.
    Validate {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Print a sweep CSV as a fixed-width table.
    Report {
        #[arg(short, long)]
        input: PathBuf,
    },
}

fn seed_override(cfg: &mut ExperimentConfig) -> Result<(), HarnessError> {
    if let Ok(v) = std::env::var("FSMCMC_SEED") {
        cfg.seed = v.trim().parse().map_err(|_| {
            HarnessError::Config(fsmcmc_harness::ConfigError {
                path: "FSMCMC_SEED".into(),
                message: format!("{v:?} is not an unsigned integer"),
            })
        })?;
    }
    Ok(())
}

/// Runs one config and reports its verdicts; `Ok(false)` on a failed verdict.
fn run_one(mut cfg: ExperimentConfig, out: &Path) -> Result<bool, HarnessError> {
    seed_override(&mut cfg)?;
    let run = run_experiment(&cfg)?;
    write_outputs(&cfg, &run, out)?;
    for v in &run.verdicts {
        println!("{} {} {}: {}", cfg.label(), if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    Ok(run.passed())
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Run {
            config,
            out,
            all,
            threads,
        } => {
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| HarnessError::Io(format!("thread pool: {e}")))?;
            }
            if all {
                let mut ok = true;
                for (name, text) in bundled::CONFIGS {
                    let cfg = ExperimentConfig::parse(text, Format::Toml)?;
                    ok &= run_one(cfg, &out.join(name))?;
                }
                Ok(ok)
            } else {
                let path = config.expect("clap requires --config without --all");
                run_one(ExperimentConfig::load(&path)?, &out)
            }
        }
        Command::Validate { config } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            seed_override(&mut cfg)?;
            println!("{}: ok ({:?}, m = {:?})", config.display(), cfg.experiment, cfg.m_list);
            Ok(true)
        }
        Command::Report { input } => {
            let text = std::fs::read_to_string(&input).map_err(|e| HarnessError::Io(format!("{}: {e}", input.display())))?;
            let rows = output::parse_csv(&text).map_err(|e| HarnessError::Io(format!("{}: {e}", input.display())))?;
            print!("{}", output::render_table(&rows));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fsmcmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
