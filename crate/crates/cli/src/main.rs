use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use centralspin_cli::{execute, CliError, Scenario};

const CHECK_SCENARIO: &str = "kind = oracle-check\nseed = 1\nn_points = 20\nboundary = periodic-fermion\n";

#[derive(Parser)]
#[command(name = "centralspin", version, about = "Central-spin entanglement scenarios")]
struct Cli {
    /// Run the built-in oracle suite (seed 1, 20 draws) and print the report.
    #[arg(long)]
    check: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV.
    Run {
        file: PathBuf,
        /// Replace a scenario value, `key=value`; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    if cli.check {
        let scenario = Scenario::parse(CHECK_SCENARIO)?;
        let outcome = execute(&scenario)?;
        outcome.table.write_to(&scenario.params_line(), std::io::stdout().lock())?;
        return match outcome.failure {
            Some(msg) => Err(CliError::Tolerance(msg)),
            None => Ok(()),
        };
    }
    let Some(Command::Run { file, overrides }) = cli.command else {
        return Err(CliError::Parse("nothing to do; use `run <file>` or `--check`".into()));
    };
    let scenario = Scenario::read(&file)?.with_overrides(&overrides)?;
    let out = scenario.out_path()?;
    let outcome = execute(&scenario)?;
    outcome.table.write_file(&scenario.params_line(), &out)?;
    eprintln!("wrote {} rows to {}", outcome.table.rows.len(), out.display());
    match outcome.failure {
        Some(msg) => Err(CliError::Tolerance(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("centralspin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
