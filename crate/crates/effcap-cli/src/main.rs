//! Command-line front end for the `effcap` library.
//!
//! Four subcommands: `capacity` evaluates one parameter point, `sweep`
//! walks one axis (or a built-in preset) and emits a figure-ready table,
//! `sample` exposes the channel sampler, and `validate` runs the
//! cross-method agreement grid against the quadrature oracle.
//!
//! Exit codes:
//!
//! ```text
//! 0  success
//! 1  validation failure (validate found disagreements)
//! 2  domain error (invalid or out-of-range parameters)
//! 3  convergence failure
//! 4  partial sweep failure (some rows carry an error column)
//! 5  I/O error
//! ```
//!
//! Machine output (CSV or JSON) goes to standard output or `--out`;
//! human-readable diagnostics go to standard error.

mod args;
mod commands;
mod config;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("effcap: {}", err.message);
            std::process::exit(err.code);
        }
    }
}
