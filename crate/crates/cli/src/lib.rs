//! Command-line front end: instance files in, JSON reports and CSV out.

mod commands;
pub mod instance;
pub mod report;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::execute;
pub use instance::InstanceFile;
pub use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}{msg}", if path.is_empty() { String::new() } else { format!("{path}: ") })]
    Parse { path: String, msg: String },
    #[error("budget: {0}")]
    Budget(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pdce", version, about = "Partial difference equations on finite abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solution module M_e
    Solve(Opts),
    /// Homology of the structure complex at e
    Homology(Opts),
    /// Write a degenerate solution as a sum of lower-order solutions
    Decompose(Opts),
    /// Class of a solution modulo degenerate solutions
    Class(Opts),
    /// Homology of the zero-sum complex at e
    Zerosum(Opts),
    /// Group cohomology with the instance's coefficient module
    Cohomology(Opts),
    /// Directional Gowers norm of a function
    Gowers(Opts),
    /// Round an approximate torus-valued solution to an exact one
    Repair(Opts),
    /// Perturb random exact solutions and repair them (CSV output)
    Sweep(Opts),
    /// Check one of the built-in examples
    Verify(VerifyOpts),
}

#[derive(Debug, Args, Default)]
pub struct Opts {
    /// Instance file (JSON)
    #[arg(short = 'i', long = "instance")]
    pub instance: String,
    /// Report file; CSV for sweep
    #[arg(short = 'o', long = "out")]
    pub out: Option<String>,
    /// Index set, 1-based, e.g. 1,2,3
    #[arg(long = "e")]
    pub e: Option<String>,
    #[arg(long = "ell")]
    pub ell: Option<usize>,
    /// Top cohomological degree
    #[arg(long = "p")]
    pub p: Option<usize>,
    #[arg(long = "seed")]
    pub seed: Option<u64>,
    /// Row budget (cohomology) or product-group budget (residuals)
    #[arg(long = "budget")]
    pub budget: Option<usize>,
    /// Comma-separated perturbation sizes, e.g. 0,1/100,0.02
    #[arg(long = "delta-grid")]
    pub delta_grid: Option<String>,
    #[arg(long = "samples")]
    pub samples: Option<usize>,
    /// Name of the function payload to use
    #[arg(long = "function")]
    pub function: Option<String>,
    /// Modulus threshold for phase extraction of disk-valued functions
    #[arg(long = "tau")]
    pub tau: Option<f64>,
    /// Print the JSON report instead of the text summary
    #[arg(long = "json")]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyOpts {
    /// Example name
    pub name: String,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<String>,
    #[arg(long = "json")]
    pub json: bool,
}

/// Parses `args` (including the program name), runs the command, prints
/// its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
