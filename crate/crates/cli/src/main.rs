use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weyl_cli::{resolve, run, Command, Overrides};

#[derive(Parser)]
#[command(name = "weyl", version, about = "Truncated Weyl transforms of measures on phase space")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Write the truncated matrix of W(measure).
    Matrix,
    /// Singular-value scan over N_list with a trend verdict.
    Scan,
    /// Run the invariant suites.
    Verify,
    /// Density sweep of a twisted convolution of two planar curves.
    Density,
    /// Finite-type, tangent-span and hyperplane tests.
    Geometry,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Matrix => Command::Matrix,
        Cmd::Scan => Command::Scan,
        Cmd::Verify => Command::Verify,
        Cmd::Density => Command::Density,
        Cmd::Geometry => Command::Geometry,
    };
    let outcome = resolve(command, &cli.overrides).and_then(|r| run(&r));
    match outcome {
        Ok(o) => {
            for line in &o.lines {
                println!("{line}");
            }
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
