use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;
use crsm::simulate::SimMode;

#[derive(Parser, Debug)]
#[command(name = "crsm", version, about = "Choquet random sup-measures on finite carriers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a capacity: monotone, completely alternating, maxitive, additive.
    Check(Opts),
    /// Möbius measure of a capacity.
    Mobius(Opts),
    /// Choquet integral of --f.
    Choquet(Opts),
    /// Extremal integral of --f.
    Extremal(Opts),
    /// Greedy optimal measure of the dual problem, with an independent oracle value.
    Dual(Opts),
    /// Joint CDF P(X(K_i) ≤ a_i) for --pairs.
    Cdf(Opts),
    /// Exact or truncated LePage simulation.
    Simulate(Opts),
    /// Fréchet scale estimate of the extremal integral of --f.
    Estimate(Opts),
    /// Ordered coupling X_* ≤ X ≤ X^* for a spectral model.
    Couple(Opts),
    /// Independence test for X(E) and the argmax set.
    ArgmaxTest(Opts),
    /// Full statistical suite; exit 0 iff every check passes.
    Verify(Opts),
    /// Rewrite any capacity model as a plain table.
    Materialize(Opts),
}

impl Command {
    pub fn opts(&self) -> &Opts {
        match self {
            Command::Check(o)
            | Command::Mobius(o)
            | Command::Choquet(o)
            | Command::Extremal(o)
            | Command::Dual(o)
            | Command::Cdf(o)
            | Command::Simulate(o)
            | Command::Estimate(o)
            | Command::Couple(o)
            | Command::ArgmaxTest(o)
            | Command::Verify(o)
            | Command::Materialize(o) => o,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Model JSON: a capacity or a tail dependence functional.
    #[arg(long)]
    pub model: PathBuf,
    /// Point function as JSON, {"f": {label: value}} or {label: value}.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// exact | truncated:K
    #[arg(long, default_value = "exact", value_parser = parse_mode)]
    pub mode: SimMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Möbius weight tolerance for `check`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Omit the timestamp from provenance.
    #[arg(long)]
    pub deterministic: bool,
    /// CDF thresholds as JSON, [{"subset": [labels], "threshold": a}, ...].
    #[arg(long)]
    pub pairs: Option<String>,
    /// Subset as a JSON label array.
    #[arg(long)]
    pub subset: Option<String>,
}

impl Opts {
    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Usage("this command is randomized and needs --seed".into()))
    }

    pub fn samples(&self) -> Result<usize, CliError> {
        self.samples.ok_or_else(|| CliError::Usage("this command needs --samples".into()))
    }

    pub fn f(&self) -> Result<&str, CliError> {
        self.f.as_deref().ok_or_else(|| CliError::Usage("this command needs --f".into()))
    }
}

pub fn parse_mode(s: &str) -> Result<SimMode, String> {
    if s == "exact" {
        return Ok(SimMode::Exact);
    }
    match s.strip_prefix("truncated:").map(str::parse::<u64>) {
        Some(Ok(k)) if k > 0 => Ok(SimMode::Truncated(k)),
        _ => Err(format!("expected `exact` or `truncated:K` with K ≥ 1, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes() {
        assert_eq!(parse_mode("exact"), Ok(SimMode::Exact));
        assert_eq!(parse_mode("truncated:12"), Ok(SimMode::Truncated(12)));
        assert!(parse_mode("truncated:0").is_err());
        assert!(parse_mode("truncated").is_err());
        assert!(parse_mode("fast").is_err());
    }
}
