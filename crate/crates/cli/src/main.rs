use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod manifest;

use error::CliResult;

/// Design and simulation workflows for 2D nonlinear photonic crystal photon-pair sources.
#[derive(Debug, Parser)]
#[command(name = "npcsim", version)]
struct Cli {
    /// Run configuration (TOML, one section per workflow).
    #[arg(long, global = true, default_value = "npcsim.toml")]
    config: PathBuf,

    /// Output directory; created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override a scalar config field, e.g. `fringe.steps=257`. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lattice periods, optimal motif, coefficient table, optional domain map and tuning curve.
    Design,
    /// Far-field emission map over external angles.
    Pattern,
    /// Coincidence fringe versus path delay.
    Fringe {
        /// Also write the itemised visibility budget.
        #[arg(long)]
        budget: bool,
    },
    /// Visibility versus polarization rotation.
    Polscan,
    /// Whether a reciprocal-space vector coincides with a lattice point.
    LatticeCheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Pattern => "pattern",
            Command::Fringe { .. } => "fringe",
            Command::Polscan => "polscan",
            Command::LatticeCheck => "lattice-check",
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let loaded = config::load(&cli.config, &cli.overrides)?;
    let mut output = match cli.command {
        Command::Design => commands::design(&loaded)?,
        Command::Pattern => commands::pattern(&loaded)?,
        Command::Fringe { budget } => commands::fringe(&loaded, budget)?,
        Command::Polscan => commands::polscan(&loaded)?,
        Command::LatticeCheck => commands::lattice_check(&loaded)?,
    };
    let name = format!("{}.config.toml", cli.command.name());
    output.file(&name, loaded.effective_text.clone().into_bytes());
    let written = manifest::write_all(&cli.out, cli.command.name(), &cli.config, &loaded, &cli.overrides, &output)?;
    for (key, value) in &output.summary {
        println!("{key}: {value}");
    }
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("npcsim: {e}");
            e.exit_code()
        }
    }
}
