//! `extremal`: batch front-end for the certifier and the branch solver.
//!
//! Exit codes: 0 success, 1 a claim was falsified (or a branch crossed its
//! certified bound), 2 inconclusive certificate or stalled continuation,
//! 3 configuration error.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use extremal_core::branch::BranchError;
use extremal_core::certifier::CertifierError;
use extremal_core::radial::RadialError;

use commands::{Finished, EXIT_CONFIG, EXIT_INCONCLUSIVE};
use config::{Cli, Command, ConfigError, RunConfig};
use output::{now_rfc3339, Metadata, ReportDir};

fn run(cli: &Cli) -> Result<(Finished, RunConfig)> {
    let cfg = match &cli.command {
        Command::Certify(a) => RunConfig::from_args(a, "13..31", 13, "certify")?,
        Command::Table(a) => RunConfig::from_args(a, "13..32", 13, "table")?,
        Command::Branch(b) => {
            if !(b.u0_max.is_finite() && b.u0_max > 0.0) {
                return Err(ConfigError("--u0-max must be positive".into()).into());
            }
            RunConfig::from_args(&b.common, "13,20,31", 5, "branch")?
        }
        Command::HrCheck(a) => RunConfig::from_args(a, "5..40", 5, "hr-check")?,
    };
    let dir = ReportDir::prepare(&cfg.out, cfg.overwrite)?;
    let finished = match &cli.command {
        Command::Certify(_) => commands::certify(&cfg, &dir)?,
        Command::Table(_) => commands::table(&cfg, &dir)?,
        Command::Branch(b) => commands::branch(&cfg, b, &dir)?,
        Command::HrCheck(_) => commands::hr_check(&cfg, &dir)?,
    };
    Ok((finished, cfg))
}

/// Configuration problems exit with 3, anything else that aborts a run
/// with 2.
fn error_code(err: &anyhow::Error) -> i32 {
    let config = err.is::<ConfigError>()
        || err.is::<RadialError>()
        || matches!(err.downcast_ref::<CertifierError>(), Some(_))
        || matches!(
            err.downcast_ref::<BranchError>(),
            Some(BranchError::InvalidParameter(_))
        );
    if config {
        EXIT_CONFIG
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let started_at = now_rfc3339();
    match run(&cli) {
        Ok((finished, cfg)) => {
            print!("{}", finished.stdout);
            let meta = Metadata {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: cli.command.name().into(),
                args: std::env::args().skip(1).collect(),
                parallelism: cfg.parallelism,
                started_at,
                finished_at: now_rfc3339(),
                exit_code: finished.code,
            };
            let written = ReportDir::prepare(&cfg.out, true)
                .and_then(|d| d.write_json("metadata.json", &meta));
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_INCONCLUSIVE as u8);
            }
            ExitCode::from(finished.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}
