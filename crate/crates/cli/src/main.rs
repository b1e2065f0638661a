//! `resonest` — batch front end for the resonator-characterization library.
//!
//! Subcommands: oracle signal generation (`gen`), coupling extraction
//! (`extract-k`), external-Q extraction (`extract-qe`), prototype-to-coupling
//! synthesis (`synth`), design-curve inversion (`invert`), and a
//! subspace-versus-periodogram comparison (`compare`). Signals, curves, and
//! spectra travel as tidy CSV; results as versioned JSON.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 estimation failure.
//! `RESONEST_LOG` (error|warn|info|debug) controls diagnostics on stderr.

mod cli;
mod commands;
mod config;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("RESONEST_LOG", "warn"))
        .format_timestamp(None)
        .init();

    let parsed = match cli::Cli::try_parse() {
        Ok(parsed) => parsed,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    if let Err(err) = commands::run(parsed) {
        eprintln!("error: {err}");
        let code = if err.is_estimation_failure() { 2 } else { 1 };
        std::process::exit(code);
    }
}
