//! Scenario runner CLI: `run`, `verify` and `sweep`.
//!
//! Exit codes: 0 success (an observed blow-up is a result, not a tool
//! failure), 1 invalid configuration or IO failure, 2 verify-suite
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use curveflow::scenario::{run_scenario, sweep, ScenarioConfig};
use curveflow::verify::{verify_suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "curveflow", about = "Area-preserving and shortening flows on closed plane curves", version)]
struct Cli {
    /// Directory receiving all output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Suppress per-run progress lines.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario file.
    Run { scenario: PathBuf },
    /// Run the acceptance criteria and print a pass/fail table.
    Verify,
    /// Re-run a scenario once per value of one overridden key.
    Sweep {
        scenario: PathBuf,
        /// Override as `key=v1,v2,...` (flat key namespace).
        #[arg(long)]
        param: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario } => {
            let cfg = match ScenarioConfig::from_file(&scenario) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run_scenario(&cfg, &cli.out_dir, cli.quiet) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify => {
            let summary = verify_suite(&VerifyOptions::default());
            print!("{}", summary.render_table());
            if summary.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Sweep { scenario, param } => {
            let (key, values) = match param.split_once('=') {
                Some((k, v)) if !v.is_empty() => (
                    k.trim().to_string(),
                    v.split(',')
                        .map(|s| s.trim().to_string())
                        .collect::<Vec<_>>(),
                ),
                _ => {
                    eprintln!("error: --param wants `key=v1,v2,...`");
                    return ExitCode::from(1);
                }
            };
            let cfg = match ScenarioConfig::from_file(&scenario) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match sweep(&cfg, &key, &values, &cli.out_dir, cli.quiet) {
                Ok(results) => {
                    if !cli.quiet {
                        for (value, report) in &results {
                            println!(
                                "{key} = {value}: {:?} at t = {:.6}",
                                report.terminal.kind, report.terminal.t_event
                            );
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
