use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degenerate_poisson::oracles::{rational, rational_from_f64, ExactRational};
use degenerate_poisson::DegenerateLambda;

#[derive(Debug, Parser)]
#[command(
    name = "degpois",
    version,
    about = "r-truncated degenerate Poisson distribution toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format for tables and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Significant digits for CSV numbers.
    #[arg(
        long,
        global = true,
        env = "DEGPOIS_PRECISION",
        default_value_t = 15,
        value_parser = clap::value_parser!(u32).range(1..=17)
    )]
    pub precision: u32,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability masses with the running CDF, up to a coverage cutoff.
    Pmf(TableArgs),
    /// Same table as `pmf`.
    Cdf(TableArgs),
    /// Closed-form mean, variance and moments next to direct summation.
    Moments(MomentArgs),
    /// Seeded draws, one per line, followed by a JSON summary line.
    Sample(SampleArgs),
    /// r-truncated degenerate Stirling numbers of the second kind.
    Stirling(StirlingArgs),
    /// Degenerate Bell polynomial values.
    Bell(BellArgs),
    /// Law of the sum of k i.i.d. copies, with a convolution column.
    SumDist(SumArgs),
    /// Runs every oracle check on the given parameters.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Degenerate parameter λ, as a decimal or an exact fraction `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: LambdaArg,
    /// Rate α > 0.
    #[arg(long)]
    pub alpha: f64,
    /// Truncation order: the support starts at r + 1.
    #[arg(long, default_value_t = 0)]
    pub r: u32,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Stop once the cumulative mass reaches 1 − coverage.
    #[arg(long, default_value_t = 1e-10)]
    pub coverage: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 4)]
    pub order: u32,
    /// Relative tolerance for the Bell and direct series.
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Generator seed, decimal or 0x-prefixed hex.
    #[arg(long, default_value = "42")]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StirlingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: LambdaArg,
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, default_value_t = 4)]
    pub k_max: u32,
}

#[derive(Debug, Clone, Args)]
pub struct BellArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: LambdaArg,
    /// Evaluation point.
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 8)]
    pub n_max: u32,
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of i.i.d. summands.
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Relative tolerance for the series evaluations.
    #[arg(long, default_value_t = 1e-15)]
    pub tol: f64,
    /// Seed for the goodness-of-fit sample.
    #[arg(long, default_value = "42")]
    pub seed: SeedArg,
    /// Draws for the goodness-of-fit sample.
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
}

/// λ as typed, kept alongside its double so `p/q` input stays exact for the
/// rational oracle.
#[derive(Debug, Clone)]
pub struct LambdaArg {
    pub raw: String,
    pub value: DegenerateLambda,
}

impl LambdaArg {
    pub fn exact(&self) -> ExactRational {
        if let Some((p, q)) = self.raw.split_once('/') {
            if let (Ok(p), Ok(q)) = (p.trim().parse::<i64>(), q.trim().parse::<i64>()) {
                return rational(p, q);
            }
        }
        rational_from_f64(self.value.value()).expect("lambda is finite")
    }
}

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let value = s.parse::<DegenerateLambda>().map_err(|e| e.to_string())?;
        Ok(LambdaArg {
            raw: s.trim().to_string(),
            value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedArg(pub u64);

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => s.parse(),
        };
        parsed
            .map(SeedArg)
            .map_err(|e| format!("invalid seed {s:?}: {e}"))
    }
}
