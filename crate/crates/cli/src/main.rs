#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod table;

use commands::{Context, Report};
use config::ConfigError;
use table::Format;

/// Edge-state counting studies for Neumann magnetic Laplacians.
#[derive(Debug, Parser)]
#[command(name = "edgestates", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML (or JSON) run configuration; built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid doublings: de Gennes grid for constants, mu, nu, halfcyl and
    /// weyl; spatial grid for strip, verify-disk and theorem2.
    #[arg(long, global = true, default_value_t = 0)]
    refine: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral constants with error bars.
    Constants,
    /// Lowest two Neumann eigenvalues of the half-line model.
    Mu,
    /// Inverse branches of the de Gennes function.
    Nu,
    /// Exact and brute-force half-cylinder counts.
    Halfcyl,
    /// Strip counts against the cylinder bound.
    Strip,
    /// Weyl-type predictions only.
    Weyl,
    /// Boundary-law convergence study on a disk or its exterior.
    VerifyDisk,
    /// Curvature-law band study on a disk or its exterior.
    Theorem2,
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Constants | Command::Weyl => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let ctx = Context { refine: cli.refine };
    let path = cli.config.as_deref();
    match cli.command {
        Command::Constants => commands::constants(&ctx),
        Command::Mu => commands::mu(&ctx, &config::load(path)?),
        Command::Nu => commands::nu(&ctx, &config::load(path)?),
        Command::Halfcyl => commands::halfcyl(&ctx, &config::load(path)?),
        Command::Strip => commands::strip(&ctx, &config::load(path)?),
        Command::Weyl => commands::weyl(&ctx, &config::load(path)?),
        Command::VerifyDisk => commands::verify_disk(&ctx, &config::load(path)?),
        Command::Theorem2 => commands::theorem2(&ctx, &config::load(path)?),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match (&report.json, format) {
        (Some(v), Format::Json) => {
            serde_json::to_writer_pretty(&mut out, v)?;
            out.write_all(b"\n")?;
        }
        _ => report.table.write(format, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// 2 for bad input or violated preconditions, 1 for anything else.
fn error_code(e: &anyhow::Error) -> u8 {
    use edgestates::Error as E;
    for cause in e.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::InvalidInput(_)
                | E::Precondition(_)
                | E::InfiniteCount { .. }
                | E::GridTooCoarse { .. }
                | E::Domain(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = run(&cli).and_then(|report| emit(&cli, &report).map(|_| report));
    match result {
        Ok(report) if report.failures.is_empty() => ExitCode::SUCCESS,
        Ok(report) => {
            for f in &report.failures {
                eprintln!("acceptance failure: {f}");
            }
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
