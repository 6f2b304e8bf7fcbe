//! Command implementations behind the `degpois` binary.
//!
//! Every command returns its full output as a string; `main` only parses
//! arguments, writes the result and maps errors to exit codes.

pub mod args;
pub mod output;
mod verify;

use std::fmt;

use degenerate_poisson::oracles::{convolve_pmf, series_moment};
use degenerate_poisson::sampling::GENERATOR;
use degenerate_poisson::{
    degenerate_bell, relative_deviation, DistributionParams, Error, SamplerState, StirlingTable,
    TruncatedDegenPoisson,
};
use serde::Serialize;

use args::{
    BellArgs, Cli, Command, MomentArgs, ParamArgs, SampleArgs, StirlingArgs, SumArgs, TableArgs,
};
use output::{Cell, Table};

pub use verify::{chi_square, VerifyReport};

/// Upper bound on rows for a coverage-limited table.
pub const MAX_TABLE_ROWS: usize = 1_000_000;

#[derive(Debug)]
pub enum CliError {
    Library(Error),
    Usage(String),
    /// The verify report was produced but some checks failed.
    Mismatch {
        failed: usize,
        report: String,
    },
    Io(std::io::Error),
}

impl CliError {
    /// 2 invalid parameters, 3 convergence failure, 4 verify mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(Error::Convergence(_)) => 3,
            CliError::Library(_) | CliError::Usage(_) => 2,
            CliError::Mismatch { .. } => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Mismatch { failed, .. } => {
                write!(f, "verification failed: {failed} check(s) out of tolerance")
            }
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the parsed command line and returns what should be written.
pub fn run(cli: &Cli) -> CliResult<String> {
    let (format, precision) = (cli.format, cli.precision);
    match &cli.command {
        Command::Pmf(a) => Ok(mass_table("pmf", a)?.render(format, precision)),
        Command::Cdf(a) => Ok(mass_table("cdf", a)?.render(format, precision)),
        Command::Moments(a) => moments(a, format, precision),
        Command::Sample(a) => sample(a),
        Command::Stirling(a) => Ok(stirling(a)?.render(format, precision)),
        Command::Bell(a) => Ok(bell(a)?.render(format, precision)),
        Command::SumDist(a) => Ok(sum_dist(a)?.render(format, precision)),
        Command::Verify(a) => {
            let report = verify::run(a)?;
            let text = format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                Err(CliError::Mismatch {
                    failed,
                    report: text,
                })
            } else {
                Ok(text)
            }
        }
    }
}

pub(crate) fn params_of(a: &ParamArgs) -> CliResult<DistributionParams> {
    Ok(DistributionParams::new(a.lambda.value, a.alpha, a.r)?)
}

pub(crate) fn dist_of(a: &ParamArgs) -> CliResult<TruncatedDegenPoisson> {
    Ok(TruncatedDegenPoisson::new(params_of(a)?)?)
}

fn echo(a: &ParamArgs) -> Vec<(&'static str, String)> {
    vec![
        ("lambda", format!("{:?}", a.lambda.value.value())),
        ("alpha", format!("{:?}", a.alpha)),
        ("r", a.r.to_string()),
    ]
}

/// Rows `(k, pmf, cdf)` from `r + 1` until the running mass reaches `1 − coverage`.
pub fn mass_table(command: &'static str, a: &TableArgs) -> CliResult<Table> {
    if !(a.coverage > 0.0 && a.coverage < 1.0) {
        return Err(CliError::Usage(format!(
            "coverage must lie in (0, 1), got {}",
            a.coverage
        )));
    }
    let dist = dist_of(&a.params)?;
    let mut params = echo(&a.params);
    params.push(("coverage", format!("{:?}", a.coverage)));
    let mut table = Table::new(command, params, vec!["k", "pmf", "cdf"]);
    let mut total = 0.0;
    for (k, p) in dist.masses() {
        total += p;
        table.push(vec![
            Cell::Int(k),
            Cell::Real(p),
            Cell::Real(dist.cdf(k as f64)),
        ]);
        if total >= 1.0 - a.coverage {
            return Ok(table);
        }
        if table.rows.len() >= MAX_TABLE_ROWS {
            return Err(Error::Convergence(format!(
                "mass coverage 1 − {} not reached within {MAX_TABLE_ROWS} support points",
                a.coverage
            ))
            .into());
        }
    }
    Ok(table)
}

/// The moment report, closed forms beside direct summation.
pub fn moments(a: &MomentArgs, format: args::Format, precision: u32) -> CliResult<String> {
    let dist = dist_of(&a.params)?;
    let mut report = dist.moment_report(a.order, a.tol)?;
    let oracle = (0..=a.order)
        .map(|n| series_moment(dist.params(), n, a.tol))
        .collect::<Result<Vec<_>, _>>()?;
    report.attach_oracle(oracle);
    match format {
        args::Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            Ok(s)
        }
        args::Format::Csv => {
            let mut params = echo(&a.params);
            params.push(("order", a.order.to_string()));
            params.push(("tol", format!("{:?}", a.tol)));
            params.push(("mean", format!("{:?}", report.mean)));
            params.push(("variance", format!("{:?}", report.variance)));
            let mut table = Table::new(
                "moments",
                params,
                vec!["n", "moment", "oracle", "relative_deviation"],
            );
            let oracle = report.oracle_moments.as_deref().unwrap_or_default();
            let dev = report.relative_deviation.as_deref().unwrap_or_default();
            for (n, &m) in report.moments.iter().enumerate() {
                table.push(vec![
                    Cell::Int(n as u64),
                    Cell::Real(m),
                    Cell::Real(oracle[n]),
                    Cell::Real(dev[n]),
                ]);
            }
            Ok(table.to_csv(precision))
        }
    }
}

#[derive(Debug, Serialize)]
struct SampleFooter {
    seed: u64,
    count: usize,
    mean: Option<f64>,
    variance: Option<f64>,
    generator: &'static str,
}

/// One draw per line, then a single-line JSON footer.
pub fn sample(a: &SampleArgs) -> CliResult<String> {
    let dist = dist_of(&a.params)?;
    let batch = SamplerState::new(dist, a.seed.0).draw_batch(a.count);
    let mut out = String::with_capacity(batch.values.len() * 3 + 128);
    for v in &batch.values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    let footer = SampleFooter {
        seed: batch.seed,
        count: batch.count,
        mean: batch.mean(),
        variance: batch.variance(),
        generator: GENERATOR,
    };
    out.push_str(&serde_json::to_string(&footer).expect("footer serializes"));
    out.push('\n');
    Ok(out)
}

pub fn stirling(a: &StirlingArgs) -> CliResult<Table> {
    let table = StirlingTable::new(a.lambda.value, a.r, a.n_max, a.k_max)?;
    if table.overflow_warning() {
        eprintln!("degpois: warning: Stirling values exceeded 1e300; precision may be degraded");
    }
    let params = vec![
        ("lambda", format!("{:?}", a.lambda.value.value())),
        ("r", a.r.to_string()),
        ("n_max", a.n_max.to_string()),
        ("k_max", a.k_max.to_string()),
    ];
    let mut out = Table::new("stirling", params, vec!["n", "k", "index", "value"]);
    let mut entries: Vec<_> = table.iter().collect();
    entries.sort_by_key(|&((n, k), _)| (k, n));
    for ((n, k), v) in entries {
        let index = k as u64 * (a.r as u64 + 1);
        out.push(vec![
            Cell::Int(n as u64),
            Cell::Int(k as u64),
            Cell::Int(index),
            Cell::Real(v),
        ]);
    }
    Ok(out)
}

pub fn bell(a: &BellArgs) -> CliResult<Table> {
    let params = vec![
        ("lambda", format!("{:?}", a.lambda.value.value())),
        ("x", format!("{:?}", a.x)),
        ("n_max", a.n_max.to_string()),
        ("tol", format!("{:?}", a.tol)),
    ];
    let mut out = Table::new("bell", params, vec!["n", "bell"]);
    for n in 0..=a.n_max {
        let v = degenerate_bell(n, a.x, a.lambda.value, a.tol)?;
        out.push(vec![Cell::Int(n as u64), Cell::Real(v)]);
    }
    Ok(out)
}

pub fn sum_dist(a: &SumArgs) -> CliResult<Table> {
    let dist = dist_of(&a.params)?;
    let sums = dist.sum_distribution(a.k, a.n_max)?;
    let conv = convolve_pmf(dist.params(), a.k, a.n_max)?;
    let mut params = echo(&a.params);
    params.push(("k", a.k.to_string()));
    params.push(("n_max", a.n_max.to_string()));
    let mut out = Table::new(
        "sum-dist",
        params,
        vec!["n", "mass", "convolution", "relative_deviation"],
    );
    for n in sums.first_index()..=a.n_max {
        let (m, c) = (sums.mass(n), conv[n]);
        out.push(vec![
            Cell::Int(n as u64),
            Cell::Real(m),
            Cell::Real(c),
            Cell::Real(relative_deviation(m, c)),
        ]);
    }
    Ok(out)
}
