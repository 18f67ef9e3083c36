//! `nlinterf`: parameter sweeps, bound checks, simulation studies and SNR
//! tables.
//!
//! Exit codes: 0 success, 1 a tolerance check failed, 2 usage or domain
//! error.

mod args;
mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, CommandKind, Format};

fn name(kind: CommandKind) -> &'static str {
    match kind {
        CommandKind::Fisher => "fisher",
        CommandKind::Bound => "bound",
        CommandKind::Simulate => "simulate",
        CommandKind::Snr => "snr",
    }
}

fn execute(cli: Cli) -> Result<usize> {
    let (kind, args) = cli.command.split();
    let args = args.with_config()?;
    let report = commands::run(kind, &args)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format.unwrap_or_default() {
        Format::Csv => report.table.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report.table.to_json(name(kind)))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(report.failures)
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match execute(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} row(s) failed their tolerance check");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
