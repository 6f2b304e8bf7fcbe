//! The `verify` command: every oracle comparison on one parameter set.

use degenerate_poisson::oracles::{
    classical_recurrence_stirling, convolve_pmf, exact_stirling_table, series_moment, to_f64,
    ExactRational,
};
use degenerate_poisson::{relative_deviation, SamplerState, StirlingTable, TruncatedDegenPoisson};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::args::VerifyArgs;
use crate::{dist_of, CliResult};

const MOMENT_ORDER: u32 = 6;
const SUM_TERMS: u32 = 4;
const SUM_N_MAX: usize = 30;
const STIRLING_N_MAX: usize = 25;
const STIRLING_K_MAX: u32 = 6;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Largest deviation observed (relative unless the name says otherwise).
    pub deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            threshold,
            passed: deviation <= threshold,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub lambda: f64,
    pub alpha: f64,
    pub r: u32,
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run(a: &VerifyArgs) -> CliResult<VerifyReport> {
    let dist = dist_of(&a.params)?;
    let p = dist.params();
    let mut checks = Vec::new();

    let total: f64 = dist
        .masses()
        .map(|(_, m)| m)
        .take_while(|&m| m >= f64::MIN_POSITIVE)
        .sum();
    checks.push(Check::new(
        "normalization (absolute)",
        (total - 1.0).abs(),
        1e-12,
    ));

    let m1 = series_moment(p, 1, a.tol)?;
    let m2 = series_moment(p, 2, a.tol)?;
    checks.push(Check::new(
        "mean vs direct summation",
        relative_deviation(dist.mean(), m1),
        1e-10,
    ));
    let series_var = m2 - m1 * m1;
    let one_point = dist.support_max() == Some(dist.support_min());
    let var_dev = if one_point && (dist.variance() - series_var).abs() <= 8.0 * f64::EPSILON * m2 {
        0.0
    } else {
        relative_deviation(dist.variance(), series_var)
    };
    checks.push(Check::new("variance vs direct summation", var_dev, 1e-10));

    let mut worst = 0.0f64;
    for n in 0..=MOMENT_ORDER {
        worst = worst.max(relative_deviation(
            dist.moment(n, a.tol)?,
            series_moment(p, n, a.tol)?,
        ));
    }
    checks.push(Check::new(
        "moments n <= 6 vs direct summation",
        worst,
        1e-9,
    ));

    let mut running = 0.0;
    let mut worst = 0.0f64;
    for (k, m) in dist.masses() {
        running += m;
        worst = worst.max((dist.cdf(k as f64) - running).abs());
        if running >= 1.0 - 1e-10 {
            break;
        }
    }
    checks.push(Check::new("cdf vs cumulative pmf (absolute)", worst, 1e-13));

    let mut worst = 0.0f64;
    for k in 1..=SUM_TERMS {
        if (k as usize) * (p.r() as usize + 1) > SUM_N_MAX {
            break;
        }
        let sums = dist.sum_distribution(k, SUM_N_MAX)?;
        let conv = convolve_pmf(p, k, SUM_N_MAX)?;
        for (n, &c) in conv.iter().enumerate() {
            worst = worst.max(relative_deviation(sums.mass(n), c));
        }
    }
    checks.push(Check::new("sum distribution vs convolution", worst, 1e-10));

    let exact_lambda = a.params.lambda.exact();
    let exact = exact_stirling_table(&exact_lambda, p.r(), STIRLING_K_MAX, STIRLING_N_MAX);
    let table = StirlingTable::new(p.lambda(), p.r(), STIRLING_N_MAX, STIRLING_K_MAX)?;
    let mut worst = 0.0f64;
    for ((n, k), v) in table.iter() {
        worst = worst.max(relative_deviation(v, to_f64(&exact[k as usize - 1][n])));
    }
    checks.push(Check::new(
        "Stirling numbers vs exact rationals",
        worst,
        1e-12,
    ));

    if p.r() == 0 {
        let rows = classical_recurrence_stirling::<ExactRational>(
            exact_lambda,
            STIRLING_N_MAX,
            STIRLING_K_MAX as usize,
        );
        let mismatches = (1..=STIRLING_K_MAX as usize)
            .flat_map(|k| (0..=STIRLING_N_MAX).map(move |n| (n, k)))
            .filter(|&(n, k)| rows[n][k] != exact[k - 1][n])
            .count();
        checks.push(Check::new(
            "Stirling r = 0 vs recurrence (mismatches)",
            mismatches as f64,
            0.0,
        ));
    }

    let batch = SamplerState::new(dist.clone(), a.seed.0).draw_batch(a.draws);
    if let Some((stat, df)) = chi_square(&dist, &batch.values) {
        let critical = ChiSquared::new(df as f64)
            .expect("df ≥ 1")
            .inverse_cdf(0.999);
        checks.push(Check::new("sampler chi-square statistic", stat, critical));
    }

    Ok(VerifyReport {
        lambda: p.lambda().value(),
        alpha: p.alpha(),
        r: p.r(),
        tol: a.tol,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Pearson statistic and degrees of freedom, with bins pooled left to right
/// until each expects at least five draws; the unobserved tail joins the last
/// bin. `None` when fewer than two bins remain.
pub fn chi_square(dist: &TruncatedDegenPoisson, values: &[u64]) -> Option<(f64, usize)> {
    let n = values.len() as f64;
    let first = dist.support_min();
    let top = *values.iter().max()?;
    let mut observed = vec![0u64; (top - first + 1) as usize];
    for &v in values {
        observed[(v - first) as usize] += 1;
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc, mut covered) = (0.0, 0.0, 0.0);
    for (i, &o) in observed.iter().enumerate() {
        let p = dist.pmf(first + i as u64);
        covered += p;
        o_acc += o as f64;
        e_acc += n * p;
        if e_acc >= 5.0 {
            bins.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    let last = bins.last_mut()?;
    last.0 += o_acc;
    last.1 += e_acc + n * (1.0 - covered).max(0.0);
    if bins.len() < 2 {
        return None;
    }
    let stat = bins.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    Some((stat, bins.len() - 1))
}
