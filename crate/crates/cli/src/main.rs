use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duhamel_cli::{run_to_exit_code, Command};

#[derive(Parser)]
#[command(name = "duhamel", version, about = "Spectral solver for dV/dt + g(xi)V = Y with measure-valued data")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trajectory CSV (and field snapshots) in the configured mode.
    Solve(Common),
    /// Same outputs for the whole-line steady solution.
    Steady(Common),
    /// Residual, increment, jump and realness checks; exit 4 on failure.
    Verify(Common),
    /// Convergence gaps, C_phi bounds and decay-rate fits.
    Asymptotics(Common),
    /// Closed form against time stepping and Simpson quadrature.
    OracleCompare(Common),
    /// One-sided mollifier sequences at jump times.
    Mollifier(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Steady(a) => (Command::Steady, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Asymptotics(a) => (Command::Asymptotics, a),
        Cmd::OracleCompare(a) => (Command::OracleCompare, a),
        Cmd::Mollifier(a) => (Command::Mollifier, a),
    };
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("duhamel: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("duhamel: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(run_to_exit_code(command, &args.config, &args.out) as u8)
}
