use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use psh_cli::config::{RawConfig, RunConfig};
use psh_cli::run::{exit_code, run, write_error, Command, Inputs};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Envelope,
    MaCheck,
    Volume,
    Regularize,
    Geodesic,
    Supercanonical,
    AcceptanceSuite,
}

/// Numerical pluripotential theory experiments on flat tori.
#[derive(Debug, Parser)]
#[command(name = "psh", version)]
struct Cli {
    command: Sub,
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "psh-out")]
    out: PathBuf,
    /// Worker threads (1 gives byte-reproducible runs).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Envelope CSV consumed by `ma-check`.
    #[arg(long)]
    phi: Option<PathBuf>,
    /// `quick` or `full` for `acceptance-suite`.
    #[arg(long)]
    scale: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Sub::Envelope => Command::Envelope,
        Sub::MaCheck => Command::MaCheck,
        Sub::Volume => Command::Volume,
        Sub::Regularize => Command::Regularize,
        Sub::Geodesic => Command::Geodesic,
        Sub::Supercanonical => Command::Supercanonical,
        Sub::AcceptanceSuite => Command::AcceptanceSuite,
    };
    let result = (|| {
        let mut raw = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| psh_core::Error::Validation(format!("{}: {e}", p.display())))?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        raw.apply_env(std::env::vars());
        if let Some(t) = cli.threads {
            raw.set("threads", &t.to_string());
        }
        if let Some(s) = cli.seed {
            raw.set("seed", &s.to_string());
        }
        if let Some(s) = &cli.scale {
            raw.set("suite.scale", s);
        }
        let cfg = RunConfig::from_raw(raw)?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
        run(cmd, &cfg, &Inputs { phi: cli.phi.clone() }, &cli.out)
    })();
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match write_error(&cli.out, &e) {
                Ok(json) => eprint!("{json}"),
                Err(_) => eprintln!("{e}"),
            }
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
