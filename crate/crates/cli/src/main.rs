use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lipsmooth_cli::{cmd_conjugate, cmd_lcnet, cmd_report, cmd_smooth, cmd_verify, exit_code, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "lipsmooth", version, about = "Smoothed metrics for group actions on one-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Distance matrix on sample points.
    Smooth,
    /// Tabulated conjugating homeomorphism.
    Conjugate,
    /// Run the verification suites; nonzero exit unless all pass.
    Verify,
    /// Build a net in ℝᵈ with its graph and checks.
    Lcnet,
    /// Run everything and write an index.
    Report,
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config { field: "--threads".into(), reason: e.to_string() })?;
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config {
        field: "--config".into(),
        reason: "a config file is required".into(),
    })?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let outcome = match cli.command {
        Command::Smooth => cmd_smooth(&cfg, &cli.out)?,
        Command::Conjugate => cmd_conjugate(&cfg, &cli.out)?,
        Command::Verify => cmd_verify(&cfg, &cli.out)?,
        Command::Lcnet => cmd_lcnet(&cfg, &cli.out)?,
        Command::Report => cmd_report(&cfg, &cli.out)?,
    };
    for f in &outcome.files {
        println!("{}", f.display());
    }
    Ok(exit_code(outcome.status))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
