use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stiefel_newton::cli::{self, Command, Flags};

/// Second-order optimization on orthogonal Stiefel manifolds.
#[derive(Parser)]
#[command(name = "stiefel-newton", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run the Newton iteration from the spec's initial point.
    Solve(CommonArgs),
    /// Test the spec's initial point for criticality and classify it.
    Classify(CommonArgs),
    /// List every critical point of a simple-spectrum Brockett problem.
    Enumerate(CommonArgs),
    /// Validate the spec's model against the finite-difference oracles.
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON problem specification.
    #[arg(long)]
    spec: PathBuf,
    /// Human-readable rendering instead of JSON.
    #[arg(long)]
    pretty: bool,
    /// Include the per-iteration trace in solve reports.
    #[arg(long)]
    trace: bool,
    /// Override the seed of a random initial point.
    #[arg(long)]
    seed: Option<u64>,
    /// Command-scoped tolerance: gradient tolerance (solve),
    /// criticality tolerance (classify), eigenvalue-gap tolerance
    /// (enumerate).
    #[arg(long)]
    tol: Option<f64>,
    /// Override the iteration budget.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Disable the gradient fallback (raw Newton iteration).
    #[arg(long)]
    pure_newton: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CliCommand::Solve(a) => (Command::Solve, a),
        CliCommand::Classify(a) => (Command::Classify, a),
        CliCommand::Enumerate(a) => (Command::Enumerate, a),
        CliCommand::Check(a) => (Command::Check, a),
    };
    let flags = Flags {
        pretty: args.pretty,
        trace: args.trace,
        seed: args.seed,
        tol: args.tol,
        max_iters: args.max_iters,
        pure_newton: args.pure_newton,
    };

    let spec = match cli::parse_problem_spec(&args.spec) {
        Ok(spec) => spec,
        Err(e) => return fail(&e),
    };
    match cli::run(command, &spec, &flags) {
        Ok((exit, report)) => {
            if flags.pretty {
                print!("{}", cli::render_pretty(&report));
            } else {
                println!("{}", cli::to_json(&report));
            }
            ExitCode::from(exit as u8)
        }
        Err(e) => fail(&e),
    }
}

fn fail(error: &stiefel_newton::Error) -> ExitCode {
    eprintln!("error: {error}");
    if let Some(hint) = cli::remediation(error) {
        eprintln!("hint: {hint}");
    }
    ExitCode::from(2)
}
