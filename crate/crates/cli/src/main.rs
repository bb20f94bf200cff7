//! `opinet`: deterministic coevolving-network opinion simulations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opinet_cli::{execute, parse_config, summarize, CliError, ExperimentSpec, SuiteName};

#[derive(Parser)]
#[command(
    name = "opinet",
    version,
    about = "Simulate coevolving social networks of homophilic, heterophilic and adversarial agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration for one or more seeded replicas.
    Run {
        /// JSON simulation config.
        #[arg(long)]
        config: PathBuf,
        /// Replica count; replica r uses seed <seed> + r.
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Base seed (defaults to the config's seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a prebuilt experiment suite.
    Suite {
        /// verification | composition | density | resistance.
        #[arg(long)]
        name: SuiteName,
        #[arg(long, default_value_t = 10)]
        replicas: usize,
        /// Base seed shared by every sweep point (paired replicas).
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Aggregate a finished manifest into a per-sweep-point summary (stdout).
    Summarize {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Run the brute-force equivalence suites for the core algorithms.
    OracleCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            replicas,
            seed,
            out,
        } => {
            let parsed = parse_config(&config)?;
            let seed_base = seed.unwrap_or(parsed.seed);
            let spec = ExperimentSpec::single(parsed, replicas, seed_base);
            let manifest = execute(&spec, &out)?;
            println!(
                "completed {} run(s); manifest at {}",
                manifest.runs.len(),
                out.join("manifest.json").display()
            );
            Ok(())
        }
        Command::Suite {
            name,
            replicas,
            seed,
            out,
        } => {
            let spec = ExperimentSpec::suite(name, replicas, seed);
            let manifest = execute(&spec, &out)?;
            println!(
                "suite {}: completed {} run(s); manifest at {}",
                name.label(),
                manifest.runs.len(),
                out.join("manifest.json").display()
            );
            Ok(())
        }
        Command::Summarize { manifest } => {
            let summary = summarize(&manifest)?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(())
        }
        Command::OracleCheck => {
            let reports = opinet_cli::oracle::check_all();
            let mut all_ok = true;
            for report in &reports {
                println!("{}", report.line());
                all_ok &= report.passed();
            }
            if all_ok {
                Ok(())
            } else {
                Err(CliError::Validation(
                    "oracle equivalence failed; see lines above".to_string(),
                ))
            }
        }
    }
}
