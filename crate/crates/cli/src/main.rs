//! `nrc`: command-line front end for the numerical-range toolkit.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage errors.
//! `NRC_THREADS` caps the worker threads used by parallel sweeps.

mod args;
mod commands;
mod plot;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NRC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| commands::Usage(format!("NRC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}

/// Write through a sibling temporary file and rename it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    match &cli.command {
        Command::Symbol(c) => commands::symbol(c),
        Command::Matrix(c) => commands::matrix(c),
        Command::Range(c) => commands::range(c),
        Command::Closedform { common, emit } => commands::closedform(common, *emit),
        Command::Compare(c) => commands::compare_cmd(c),
        Command::Curve { common, l, emit } => commands::curve(common, *l, *emit),
        Command::Check { suite, common } => commands::check(common, *suite),
        Command::Plot { common, input, overlay } => commands::plot(common, input, overlay.as_deref()),
    }
}

fn out_path(cli: &Cli) -> Option<&Path> {
    let common = match &cli.command {
        Command::Symbol(c) | Command::Matrix(c) | Command::Range(c) | Command::Compare(c) => c,
        Command::Closedform { common, .. }
        | Command::Curve { common, .. }
        | Command::Check { common, .. }
        | Command::Plot { common, .. } => common,
    };
    common.out.as_deref()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| {
        match out_path(&cli) {
            Some(p) => write_atomic(p, &o.bytes)?,
            None => std::io::stdout().lock().write_all(&o.bytes)?,
        }
        Ok(o)
    });
    match outcome {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("nrc: check failed");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(e) => {
            eprintln!("nrc: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
