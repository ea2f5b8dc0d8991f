use std::path::PathBuf;
use std::process::ExitCode;

use celeste::{run_scenario, Command, Options};
use clap::Parser;

/// Exact celestial integration on toric towers.
#[derive(Parser, Debug)]
#[command(name = "celeste", version)]
struct Args {
    /// What to compute.
    command: Command,
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Print the stratum-by-stratum breakdown.
    #[arg(long)]
    verbose: bool,
    /// Re-verify invariants of the result.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        verbose: args.verbose,
        check: args.check,
    };
    let outcome = run_scenario(args.command, &args.scenario, opts);
    print!("{}", outcome.report);
    ExitCode::from(outcome.status as u8)
}
