use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radshock_cli::config::{parse_float_list, FloatList};
use radshock_cli::{
    cmd_baby, cmd_expansion, cmd_profile, cmd_sweep, cmd_verify, finish, CliError, Format,
    Overrides, RunConfig,
};

#[derive(Parser)]
#[command(name = "radshock", version, about = "Smooth radiative shock profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Shock amplitude (half the velocity jump).
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute, verify and write a gas shock profile.
    Profile,
    /// Run the pipeline over a grid of (gamma, a).
    Sweep {
        /// Comma-separated amplitudes.
        #[arg(long, value_parser = parse_float_list)]
        a_list: Option<FloatList>,
        /// Comma-separated adiabatic exponents.
        #[arg(long, value_parser = parse_float_list)]
        gamma_list: Option<FloatList>,
    },
    /// Profile of the scalar radiating Burgers model with end states ±a.
    Baby,
    /// Recompute every residual from a written profile file.
    Verify {
        file: PathBuf,
        /// Companion summary; defaults to summary.json next to the file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Expansion coefficients of the profile at the glue point.
    Expansion {
        #[arg(long, short = 'n')]
        order: Option<usize>,
        /// Use the scalar model instead of the gas.
        #[arg(long)]
        baby: bool,
    },
}

fn run(cli: Cli) -> Result<radshock_cli::Outcome, CliError> {
    let mut ov = Overrides {
        a: cli.common.a,
        gamma: cli.common.gamma,
        out: cli.common.out,
        format: cli.common.format,
        ..Default::default()
    };
    match &cli.command {
        Command::Sweep { a_list, gamma_list } => {
            ov.a_list = a_list.as_ref().map(|l| l.0.clone());
            ov.gamma_list = gamma_list.as_ref().map(|l| l.0.clone());
        }
        Command::Expansion { order, .. } => ov.order = *order,
        _ => {}
    }
    let mut cfg = RunConfig::load(cli.common.config.as_deref(), &ov)?;
    match cli.command {
        Command::Profile => cmd_profile(&cfg),
        Command::Sweep { .. } => cmd_sweep(&cfg),
        Command::Baby => {
            if ov.a.is_none() && cli.common.config.is_none() {
                cfg.a = 0.5;
            }
            cmd_baby(&cfg)
        }
        Command::Verify { file, summary } => cmd_verify(&cfg, &file, summary.as_deref()),
        Command::Expansion { baby, .. } => cmd_expansion(&cfg, baby),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(finish(run(cli)) as u8)
}
