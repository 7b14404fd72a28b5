//! Command implementations behind the `duhamel` binary.
//!
//! Each command reads an experiment config, writes CSV/JSON artifacts to an
//! output directory and maps failures to exit codes: 2 for config errors, 3 for
//! violated preconditions, 4 for failed verification and 1 for I/O or
//! numerical failures.

pub mod commands;
pub mod error;

use std::path::Path;

use duhamel::config::ExperimentConfig;

pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Steady,
    Verify,
    Asymptotics,
    OracleCompare,
    Mollifier,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Steady => "steady",
            Command::Verify => "verify",
            Command::Asymptotics => "asymptotics",
            Command::OracleCompare => "oracle-compare",
            Command::Mollifier => "mollifier",
        }
    }
}

pub fn run(command: Command, config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_path(config_path)?;
    let mut out = commands::Output::create(out_dir)?;
    match command {
        Command::Solve => commands::solve(&cfg, &mut out),
        Command::Steady => commands::steady(&cfg, &mut out),
        Command::Verify => commands::verify(&cfg, &mut out),
        Command::Asymptotics => commands::asymptotics(&cfg, &mut out),
        Command::OracleCompare => commands::oracle_compare(&cfg, &mut out),
        Command::Mollifier => commands::mollifier(&cfg, &mut out),
    }
}

/// Runs a command and returns its process exit code, reporting errors on stderr.
pub fn run_to_exit_code(command: Command, config_path: &Path, out_dir: &Path) -> i32 {
    match run(command, config_path, out_dir) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("duhamel {}: {e}", command.as_str());
            e.exit_code()
        }
    }
}
