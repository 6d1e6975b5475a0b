use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use khessian_cli::commands::{cmd_mms, cmd_props, cmd_solve, cmd_verify, CliError, PropsArgs};

/// Complex k-Hessian Dirichlet solver and verification tools.
///
/// Exit status: 0 on success, 1 on numerical failure or failed checks,
/// 2 on configuration or argument errors. Set KHESSIAN_THREADS to bound the
/// worker pool.
#[derive(Parser)]
#[command(name = "khessian", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a config file.
    Solve { config: PathBuf },
    /// Sample the cone inequalities and report violations.
    Props {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh-refinement study.
    Mms {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "9,17,33")]
        resolutions: Vec<usize>,
    },
    /// Subsolution, comparison and maximum-principle checks.
    Verify { config: PathBuf },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KHESSIAN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("KHESSIAN_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::Props { n, k, samples, seed, out } => cmd_props(&PropsArgs { n, k, samples, seed, out }),
        Command::Mms { config, resolutions } => cmd_mms(&config, &resolutions),
        Command::Verify { config } => cmd_verify(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
