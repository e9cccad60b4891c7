//! `shell-rhs` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BoundsArgs, HardyArgs, PolesArgs, SemigroupArgs, SmatrixArgs, TransformArgs, WavefunctionArgs};
use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "shell-rhs",
    version,
    about = "Shell-potential scattering and Hardy-class diagnostics"
)]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Run configuration file (`[section]` / `key = value`).
    #[arg(long, global = true, help_heading = "Global options")]
    config: Option<PathBuf>,

    /// Output directory; overrides the config's [output] directory.
    #[arg(long, global = true, help_heading = "Global options")]
    out: Option<PathBuf>,

    /// Seed for randomized suites; overrides [run] seed.
    #[arg(long, global = true, help_heading = "Global options")]
    seed: Option<u64>,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, help_heading = "Global options")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// S(E) on a real energy grid
    Smatrix(SmatrixArgs),
    /// Resonance poles in a rectangle of the lower k half-plane
    Poles(PolesArgs),
    /// ⟨r|E±⟩ or its continuation on the radial grid
    Wavefunction(WavefunctionArgs),
    /// Position ↔ energy spectral transforms
    Transform(TransformArgs),
    /// Hardy-class diagnostic of a half-line bump transform
    Hardy(HardyArgs),
    /// Hardy membership under forward and backward evolution
    Semigroup(SemigroupArgs),
    /// Kernel and wavefunction growth against the analytic bounds
    Bounds(BoundsArgs),
}

/// Bad flags or flag combinations detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<ConfigError>().is_some() || e.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {e:#}");
                ExitCode::from(1)
            } else if let Some(err) = e.downcast_ref::<shell_rhs::Error>() {
                eprintln!("error[{}]: {err}", variant_name(err));
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        }
    }
}

fn variant_name(e: &shell_rhs::Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("")
        .to_string()
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output = out;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let written = match cli.command {
        Command::Smatrix(a) => commands::smatrix(&cfg, a)?,
        Command::Poles(a) => commands::poles(&cfg, a)?,
        Command::Wavefunction(a) => commands::wavefunction(&cfg, a)?,
        Command::Transform(a) => commands::transform(&cfg, a)?,
        Command::Hardy(a) => commands::hardy(&cfg, a)?,
        Command::Semigroup(a) => commands::semigroup(&cfg, a)?,
        Command::Bounds(a) => commands::bounds(&cfg, a)?,
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}
