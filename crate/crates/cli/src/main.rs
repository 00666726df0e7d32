mod commands;
mod config;
mod output;

use clap::Parser;
use commands::{run, RunError};
use config::{Cli, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with status 2 on usage errors
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: failed to start {} worker threads: {e}", cfg.threads);
            return ExitCode::from(1);
        }
    };

    match pool.install(|| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Verification) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
