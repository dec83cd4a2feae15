//! `simkit` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "simkit", version, about = "Classical simulation sweeps, LHV certificates and witness tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Quadrature degree on each sphere [default: 2 * 2S].
    #[arg(long, env = "SIMKIT_GRID_DEGREE", global = true)]
    pub grid_degree: Option<usize>,

    /// Verification tolerance.
    #[arg(long, default_value_t = 1e-10, global = true)]
    pub tol: f64,

    /// Seed for randomized self-tests.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessFamily {
    Pure,
    RankTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResourceKind {
    Bell,
    Pure,
    RankTwo,
}

#[derive(Debug, Clone, Args)]
pub struct AlphaRange {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

impl AlphaRange {
    pub fn resolve(&self, lo: f64, hi: f64, step: f64) -> (f64, f64, f64) {
        (self.alpha_lo.unwrap_or(lo), self.alpha_hi.unwrap_or(hi), self.step.unwrap_or(step))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RankTwoParams {
    /// Mixing weight of the first pure component.
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,

    /// Angle of the first pure component (radians, `pi/3` style accepted).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,

    /// Angle of the second pure component.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_p: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal simulating spin over an alpha window, including every jump point.
    Staircase {
        #[command(flatten)]
        range: AlphaRange,
    },
    /// Region, minimal spin and hidden-variable count per alpha.
    Classify {
        /// Explicit alpha values; overrides the range.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        #[command(flatten)]
        range: AlphaRange,
    },
    /// Separable ensemble reproducing the Werner Q function at the minimal spin.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Projected partial-transpose eigenvalue across a list of spins.
    Witness {
        #[arg(long, value_enum, default_value_t = WitnessFamily::Pure)]
        family: WitnessFamily,
        /// Values of 2S.
        #[arg(long, value_delimiter = ',', default_values_t = (2..=20).collect::<Vec<u32>>())]
        spin_twice: Vec<u32>,
        #[command(flatten)]
        params: RankTwoParams,
    },
    /// Hidden-variable counts over alpha and versus approximation error.
    Resources {
        #[command(flatten)]
        range: AlphaRange,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![ResourceKind::Bell, ResourceKind::Pure, ResourceKind::RankTwo])]
        family: Vec<ResourceKind>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3])]
        epsilon: Vec<f64>,
        #[command(flatten)]
        params: RankTwoParams,
    },
    /// Randomized consistency checks of the numerical core.
    Selftest {
        /// Number of random trials.
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, t),
    };
    let value = if let Some(rest) = t.strip_prefix("pi") {
        let rest = rest.trim();
        if rest.is_empty() {
            std::f64::consts::PI
        } else if let Some(d) = rest.strip_prefix('/') {
            let d: f64 = d.trim().parse().map_err(|e| format!("bad divisor in {s:?}: {e}"))?;
            std::f64::consts::PI / d
        } else {
            return Err(format!("cannot parse angle {s:?}"));
        }
    } else {
        t.parse::<f64>().map_err(|e| format!("cannot parse angle {s:?}: {e}"))?
    };
    Ok(sign * value)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::VerificationFailed) => ExitCode::from(1),
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::CliError::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(parse_angle("-PI").unwrap(), -std::f64::consts::PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
