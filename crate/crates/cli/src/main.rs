use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ghostsim::{run, CliError, Command, Options, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Pattern,
    Duality,
    Sweep,
    OracleCompare,
}

/// Ghost-interference simulator: coincidence patterns, duality reports,
/// parameter sweeps and grid-oracle comparisons.
#[derive(Debug, Parser)]
#[command(name = "ghostsim", version)]
struct Args {
    command: Cmd,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for random detectors.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let command = match args.command {
        Cmd::Pattern => Command::Pattern,
        Cmd::Duality => Command::Duality,
        Cmd::Sweep => Command::Sweep,
        Cmd::OracleCompare => Command::OracleCompare,
    };
    let config = RunConfig::load(&args.config)?;
    let opts = Options { out: args.out.clone(), seed: args.seed };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| run(command, config, &opts))?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for v in &outcome.violations {
        eprintln!("invariant violated: {v}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
