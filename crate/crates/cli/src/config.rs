//! Command-line options and their validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extremal_core::certifier::Threshold;
use extremal_core::radial::parse_rational;
use extremal_core::SearchOptions;
use num_rational::BigRational;
use num_traits::Signed;

#[derive(Debug, Parser)]
#[command(
    name = "extremal",
    version,
    about = "Certified singularity checks and branch continuation for Δ²u = λeᵘ"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify singularity of the extremal solution for each dimension.
    Certify(CommonArgs),
    /// Compare computed enclosures with the published admissible pairs.
    Table(CommonArgs),
    /// Continue the minimal branch and compare λ* with the certified bound.
    Branch(BranchArgs),
    /// Check the Hardy-Rellich ingredients and the classical threshold.
    HrCheck(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify(_) => "certify",
            Command::Table(_) => "table",
            Command::Branch(_) => "branch",
            Command::HrCheck(_) => "hr-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Dimensions: a list and/or inclusive ranges, e.g. `13..31` or `5,13..=20`.
    #[arg(long)]
    pub dims: Option<String>,
    /// Exponent m of the test function, as an exact rational such as `7/2`.
    /// Defaults to 7/2 for N ≤ 31 and 2 for N ≥ 32.
    #[arg(long)]
    pub m: Option<String>,
    /// Relative stopping gap of the rigorous searches.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Largest bisection depth of the rigorous searches.
    #[arg(long, default_value_t = 60)]
    pub max_depth: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Override λ′: an exact rational, optionally times a power of e, e.g. `6720*e^2`.
    #[arg(long)]
    pub lambda_prime: Option<String>,
    /// Override β, in the same syntax as `--lambda-prime`.
    #[arg(long)]
    pub beta: Option<String>,
    /// Report directory.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
    /// Allow writing into an existing report directory.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BranchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Stop the continuation once u(0) exceeds this.
    #[arg(long, default_value_t = 25.0)]
    pub u0_max: f64,
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Ascending, without duplicates.
    pub dimensions: Vec<u32>,
    pub m: Option<BigRational>,
    pub search: SearchOptions,
    pub format: Format,
    pub parallelism: usize,
    pub lambda_prime: Option<Threshold>,
    pub beta: Option<Threshold>,
    pub out: PathBuf,
    pub overwrite: bool,
}

/// Rejected before any work is done; maps to exit code 3.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn config_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Parses `13..31`, `13..=31`, `13` and comma-separated mixtures; both
/// range forms are inclusive.
pub fn parse_dims(s: &str) -> Result<Vec<u32>, ConfigError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| config_err(format!("bad dimension {t:?} in {s:?}")))
        };
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(config_err(format!("empty range {part:?}")));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(config_err("no dimensions given"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `c` or `c*e^s` with exact rationals `c > 0` and `s`; `e^(s)` is accepted.
pub fn parse_threshold(s: &str) -> Result<Threshold, ConfigError> {
    let bad =
        |e: extremal_core::radial::RadialError| config_err(format!("bad constant {s:?}: {e}"));
    let t = match s.split_once("*e^") {
        Some((c, shift)) => {
            let shift = shift.trim().trim_start_matches('(').trim_end_matches(')');
            Threshold::scaled_exp(
                parse_rational(c).map_err(bad)?,
                parse_rational(shift).map_err(bad)?,
            )
        }
        None => Threshold::rational(parse_rational(s).map_err(bad)?),
    };
    if !t.is_positive() {
        return Err(config_err(format!("constant {s:?} must be positive")));
    }
    Ok(t)
}

impl RunConfig {
    pub fn from_args(
        args: &CommonArgs,
        default_dims: &str,
        min_dim: u32,
        what: &str,
    ) -> Result<RunConfig, ConfigError> {
        let dimensions = parse_dims(args.dims.as_deref().unwrap_or(default_dims))?;
        if let Some(&n) = dimensions.iter().find(|&&n| n < min_dim) {
            return Err(config_err(format!(
                "{what} requires N >= {min_dim}, got N = {n}"
            )));
        }
        let m = match &args.m {
            Some(s) => {
                let m = parse_rational(s).map_err(|e| config_err(format!("bad --m: {e}")))?;
                if !m.is_positive() {
                    return Err(config_err("--m must be positive"));
                }
                Some(m)
            }
            None => None,
        };
        if !(args.tol.is_finite() && args.tol > 0.0) {
            return Err(config_err("--tol must be positive"));
        }
        if args.max_depth == 0 {
            return Err(config_err("--max-depth must be positive"));
        }
        let parallelism = match args.parallelism {
            Some(0) => return Err(config_err("--parallelism must be positive")),
            Some(p) => p,
            None => std::thread::available_parallelism().map_or(1, |p| p.get()),
        };
        let search = SearchOptions {
            tol: args.tol,
            max_depth: args.max_depth,
            ..SearchOptions::default()
        };
        Ok(RunConfig {
            dimensions,
            m,
            search,
            format: args.format,
            parallelism,
            lambda_prime: args
                .lambda_prime
                .as_deref()
                .map(parse_threshold)
                .transpose()?,
            beta: args.beta.as_deref().map(parse_threshold).transpose()?,
            out: args.out.clone(),
            overwrite: args.overwrite,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_lists_and_ranges() {
        assert_eq!(parse_dims("13..31").unwrap().len(), 19);
        assert_eq!(parse_dims("13..=15").unwrap(), vec![13, 14, 15]);
        assert_eq!(parse_dims("20, 5..6,20").unwrap(), vec![5, 6, 20]);
        assert!(parse_dims("9..8").is_err());
        assert!(parse_dims("x").is_err());
        assert!(parse_dims(" , ").is_err());
    }

    #[test]
    fn thresholds_parse_exactly() {
        let t = parse_threshold("6720*e^2").unwrap();
        assert_eq!(t.to_string(), "6720*e^(2)");
        assert_eq!(parse_threshold("6720*e^(2)").unwrap(), t);
        assert_eq!(parse_threshold("2523.5").unwrap().to_string(), "5047/2");
        assert!(parse_threshold("-1").is_err());
        assert!(parse_threshold("abc").is_err());
    }
}
