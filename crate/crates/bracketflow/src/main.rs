use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bracketflow", version, about = "Run Lie-bracket approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment configuration
    Run {
        config: PathBuf,
        /// Directory the configured output path is relative to
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// List the built-in scenarios
    ListScenarios,
    /// Check a set of fixed invariants
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, output_root } => {
            let root = output_root.unwrap_or_else(bracketflow::output_root);
            bracketflow::run_and_report(&config, &root)
        }
        Command::ListScenarios => {
            for (name, description) in bracketflow_core::scenarios::SCENARIOS {
                println!("{name:<10} {description}");
            }
            0
        }
        Command::Selftest => {
            if bracketflow::selftest::run() {
                0
            } else {
                1
            }
        }
    };
    ExitCode::from(code as u8)
}
