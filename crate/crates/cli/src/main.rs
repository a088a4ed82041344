use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nls_scatter::Execution;
use nls_scatter_cli::commands;

/// Reflection and transmission off confined potentials with confined
/// nonlinearity.
#[derive(Parser)]
#[command(name = "nls-scatter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the energy grid of a JSON config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate grid points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Run a built-in reference fixture (1-5): CSV plus plot script.
    Figure {
        n: u8,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Print the fixture's JSON config.
        #[arg(long)]
        show_config: bool,
        #[arg(long)]
        serial: bool,
    },
    /// Scatter at a single energy and print amplitudes and diagnostics.
    Point {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
    },
    /// Run the self-check battery; the integrator tolerance can be
    /// overridden through NLS_SEED_TOL.
    Verify {
        /// Force gamma = 0 in every check.
        #[arg(long)]
        linear: bool,
    },
}

fn exec(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Sweep {
            config,
            out,
            serial,
        } => commands::cmd_sweep(&config, out.as_deref(), exec(serial)),
        Command::Figure {
            n,
            out_dir,
            show_config,
            serial,
        } => commands::cmd_figure(n, out_dir.as_deref(), show_config, exec(serial)),
        Command::Point { config, energy } => commands::cmd_point(&config, energy),
        Command::Verify { linear } => commands::cmd_verify(linear),
    };
    ExitCode::from(code)
}
