use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupled_fpi_cli::run::{parse_env_seed, render_table, EXIT_USAGE, SEED_ENV};
use coupled_fpi_cli::{parse_spec, run, RunError, RunOptions};

#[derive(Parser)]
#[command(
    name = "coupled-fpi",
    version,
    about = "Coupled fixed points of mixed monotone maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check hypotheses and solve the problem in a JSON spec file.
    Solve {
        spec: PathBuf,
        /// Directory for trace.csv and report.json.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Solve even if preflight fails.
        #[arg(long)]
        force: bool,
        /// Sampler seed, overriding the spec and COUPLED_FPI_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration cap, overriding the spec.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Suppress the standard-output table.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let Command::Solve {
        spec,
        out_dir,
        force,
        seed,
        max_iter,
        quiet,
    } = cli.command;

    let result = (|| {
        let text = std::fs::read_to_string(&spec).map_err(|e| RunError::Io(spec.clone(), e))?;
        let parsed = parse_spec(&text)?;
        let env_seed = parse_env_seed(std::env::var(SEED_ENV).ok().as_deref())?;
        let opts = RunOptions {
            out_dir,
            force,
            seed,
            env_seed,
            max_iter,
        };
        run(&parsed, &opts)
    })();

    match result {
        Ok(artifacts) => {
            if !quiet {
                print!("{}", render_table(&artifacts));
            }
            if let coupled_fpi_cli::RunResult::SolverError { message } = &artifacts.result {
                eprintln!("error: {message}");
            }
            ExitCode::from(artifacts.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
