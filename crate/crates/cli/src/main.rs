mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use gtclab::{Error, Execution};

use args::{Cli, Command};

const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => EXIT_BUDGET,
        Some(Error::Numerical(_) | Error::InsufficientData(_) | Error::NotInCentralizer(_)) => EXIT_NUMERICAL,
        Some(_) => EXIT_USAGE,
        None => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Error::InvalidParameter("--jobs must be positive".into()).into());
    }
    if let Some(path) = &cli.save_config {
        let text = match &cli.command {
            Command::Distance(a) => config::render(a, cli.jobs),
            Command::Map(a) => config::render(a, cli.jobs),
            Command::Catalog(a) => config::render(a, cli.jobs),
            Command::Simulate(a) => config::render(a, cli.jobs),
            Command::Threshold(a) => config::render(a, cli.jobs),
            Command::Flagcheck(a) => config::render(a, cli.jobs),
        }?;
        std::fs::write(path, text)?;
    }
    let exec = if jobs > 1 { Execution::Parallel } else { Execution::Sequential };
    let go = || match &cli.command {
        Command::Distance(a) => commands::distance(a, exec),
        Command::Map(a) => commands::map(a),
        Command::Catalog(a) => commands::catalog(a, exec),
        Command::Simulate(a) => commands::simulate(a, exec),
        Command::Threshold(a) => commands::threshold(a, exec),
        Command::Flagcheck(a) => commands::flagcheck(a, exec),
    };
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        pool.install(go)
    }
    #[cfg(not(feature = "parallel"))]
    go()
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
