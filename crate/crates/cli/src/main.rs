use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nframes_cli::runner::{self, Overrides};
use nframes_cli::suites::{default_trials, run_suite, SUITE_NAMES};
use nframes_cli::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "nframes", version, about = "Continuous frames in n-Hilbert spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Relative frame-test tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the operations of a config and write the JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the eigenvalues of the configured operator as CSV.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Run a named theorem suite (or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("NFRAMES_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn load(path: &Path, overrides: Overrides) -> Result<ExperimentConfig, CliError> {
    runner::prepare(ExperimentConfig::load(path)?, overrides)
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let overrides = Overrides { seed: cli.seed, tol: cli.tol };
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config, overrides)?;
            let report = runner::run(&cfg)?;
            std::fs::write(&out, report.to_json())?;
            for op in &report.operations {
                for c in op.checks.iter().filter(|c| !c.pass) {
                    eprintln!("FAIL {}.{} residual {:e}", op.name, c.id, c.residual);
                }
            }
            Ok(report.all_pass())
        }
        Command::Spectrum { config, csv } => {
            let cfg = load(&config, overrides)?;
            std::fs::write(&csv, runner::spectrum_csv(&runner::spectrum(&cfg)?))?;
            Ok(true)
        }
        Command::Verify { suite, trials } => {
            let names: Vec<&str> = if suite == "all" {
                SUITE_NAMES.to_vec()
            } else if SUITE_NAMES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(CliError::Validation(format!(
                    "unknown suite `{suite}`; expected one of {} or all",
                    SUITE_NAMES.join(", ")
                )));
            };
            let mut ok = true;
            for name in names {
                let n = trials.or(default_trials(name)).expect("known suite");
                let r = run_suite(name, n, cli.seed.unwrap_or(0)).expect("known suite");
                println!(
                    "{} {name}: {} trials, {} failures, worst residual/tolerance {:.3e}",
                    if r.pass() { "PASS" } else { "FAIL" },
                    r.trials,
                    r.failures,
                    r.worst_ratio
                );
                for c in &r.failed_checks {
                    println!("  failed {c}");
                }
                ok &= r.pass();
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
