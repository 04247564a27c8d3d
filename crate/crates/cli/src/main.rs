//! `onionlab`: key generation, onion round trips, security games, attacks,
//! privacy-notion games and wire vectors from the command line.

mod commands;
mod config;
mod keys;
mod output;

use clap::{Parser, Subcommand};
use config::{RunConfig, Settings};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "onionlab", version, about = "Onion routing lab: formats, games, attacks and privacy notions")]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate router key pairs and write a directory.
    Keygen(commands::KeygenArgs),
    /// Form an onion and process it hop by hop.
    Roundtrip(commands::RoundtripArgs),
    /// Run a security game against its distinguishers.
    Game(commands::GameArgs),
    /// Run an attack.
    Attack(commands::AttackArgs),
    /// Run a privacy-notion game on the ideal functionality.
    Notion(commands::NotionArgs),
    /// Emit the wire vectors of every scheme as JSON.
    Vectors(commands::VectorsArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::resolve(cli.settings, cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Keygen(a) => commands::keygen(&cfg, &a),
        Command::Roundtrip(a) => commands::roundtrip(&cfg, &a),
        Command::Game(a) => commands::game(&cfg, &a),
        Command::Attack(a) => commands::attack(&cfg, &a),
        Command::Notion(a) => commands::notion(&cfg, &a),
        Command::Vectors(a) => commands::vectors(&cfg, &a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
