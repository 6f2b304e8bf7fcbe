//! Brute-force reference implementations.
//!
//! Each routine takes a different path from the library proper (direct
//! summation instead of closed forms, a recurrence instead of EGF powers,
//! discrete convolution instead of Stirling numbers, exact rationals instead of
//! doubles). They back the test suites and the `verify` command.

mod exact;

pub use exact::{
    classical_recurrence_stirling, exact_falling_factorial, exact_stirling_r_truncated,
    exact_stirling_table, rational, rational_from_f64, to_f64, ExactRational,
};

use crate::degenerate::{classify_domain, DistributionParams, DomainClass};
use crate::distribution::TruncatedDegenPoisson;
use crate::error::{Error, Result};
use crate::special::{check_tolerance, MAX_SERIES_TERMS};

/// `E[Xⁿ]` by summing `Σ_{k>r} kⁿ (1)_{k,λ} αᵏ/k!` and dividing by the
/// separately summed normalizer, until both remaining tails fall below `tol`
/// relative.
pub fn series_moment(params: &DistributionParams, n: u32, tol: f64) -> Result<f64> {
    check_tolerance(tol)?;
    let support_max = match classify_domain(params) {
        DomainClass::Invalid(reason) => return Err(Error::InvalidParams(reason)),
        d => d.support_max(),
    };
    let alpha = params.alpha();
    let l = params.lambda().value();
    let limit = alpha * (-l).max(0.0);
    let first = params.r() as u64 + 1;

    // (1)_{k,λ} αᵏ / k!, built factor by factor
    let mut w = 1.0;
    for j in 0..first {
        w *= alpha * (1.0 - j as f64 * l) / (j + 1) as f64;
    }

    let mut num = 0.0;
    let mut den = 0.0;
    let mut k = first;
    for _ in 0..MAX_SERIES_TERMS {
        let power = (k as f64).powi(n as i32);
        num += power * w;
        den += w;
        if support_max == Some(k) {
            return Ok(num / den);
        }
        let step = alpha * (1.0 - k as f64 * l) / (k + 1) as f64;
        let rho_w = step.max(limit);
        let rho = ((k + 1) as f64 / k as f64).powi(n as i32) * rho_w;
        if w == 0.0
            || (rho < 1.0
                && power * w * rho / (1.0 - rho) <= tol * num
                && w * rho_w / (1.0 - rho_w) <= tol * den)
        {
            return Ok(num / den);
        }
        w *= step;
        k += 1;
    }
    Err(Error::Convergence(format!(
        "moment series of order {n} did not reach tolerance {tol:e} within {MAX_SERIES_TERMS} terms"
    )))
}

/// The `k`-fold discrete convolution of the pmf, truncated at `n_max`.
pub fn convolve_pmf(params: &DistributionParams, k: u32, n_max: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "number of summands must be ≥ 1".into(),
        ));
    }
    let dist = TruncatedDegenPoisson::new(*params)?;
    let base: Vec<f64> = (0..=n_max as u64).map(|i| dist.pmf(i)).collect();
    let mut acc = base.clone();
    for _ in 1..k {
        acc = (0..=n_max)
            .map(|n| (0..=n).map(|j| acc[j] * base[n - j]).sum())
            .collect();
    }
    Ok(acc)
}

/// Classical Stirling numbers of the second kind `S(n, k)`, `k ≤ n ≤ n_max`,
/// from the integer recurrence `S(n+1, k) = S(n, k−1) + k S(n, k)`.
pub fn classical_stirling(n_max: usize) -> Vec<Vec<u128>> {
    let mut rows = vec![vec![0u128; n_max + 1]; n_max + 1];
    rows[0][0] = 1;
    for n in 0..n_max {
        for k in 1..=n + 1 {
            rows[n + 1][k] = rows[n][k - 1] + k as u128 * rows[n][k];
        }
    }
    rows
}

/// Touchard/Bell polynomial `Bel_n(x) = Σ_k S(n, k) xᵏ`.
pub fn classical_bell(n: usize, x: f64) -> f64 {
    let s = classical_stirling(n);
    (0..=n).map(|k| s[n][k] as f64 * x.powi(k as i32)).sum()
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// The classical r-truncated Poisson law, written with `exp` and factorials
/// only. Reference for the `λ → 0` limit.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalTruncatedPoisson {
    pub alpha: f64,
    pub r: u32,
    pub normalizer: f64,
}

impl ClassicalTruncatedPoisson {
    /// `eᵅ − Σ_{l≤r} αˡ/l!`, summed as the tail `Σ_{l>r} exp(l ln α − ln l!)`
    /// so that small `α` with large `r` does not cancel.
    pub fn new(alpha: f64, r: u32) -> Self {
        let mut normalizer = 0.0;
        let mut l = r as u64 + 1;
        loop {
            let term = log_term(alpha, l).exp();
            normalizer += term;
            if l as f64 > alpha && term <= normalizer * f64::EPSILON / 4.0 {
                break;
            }
            l += 1;
        }
        ClassicalTruncatedPoisson {
            alpha,
            r,
            normalizer,
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k <= self.r as u64 {
            return 0.0;
        }
        log_term(self.alpha, k).exp() / self.normalizer
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.r as f64 + 1.0 {
            return 0.0;
        }
        let top = x.floor() as u64;
        ((self.r as u64 + 1)..=top).map(|k| self.pmf(k)).sum()
    }

    /// `α + α^{r+1} / (r! N)`.
    pub fn mean(&self) -> f64 {
        let r = self.r as u64;
        self.alpha + self.alpha.powi(self.r as i32 + 1) / (factorial(r) * self.normalizer)
    }

    /// From `E[X(X−1)] = α² (N + αʳ/r! + α^{r−1}/(r−1)!) / N`.
    pub fn variance(&self) -> f64 {
        let a = self.alpha;
        let r = self.r as u64;
        let mut shifted = self.normalizer + a.powi(self.r as i32) / factorial(r);
        if r >= 1 {
            shifted += a.powi(self.r as i32 - 1) / factorial(r - 1);
        }
        let factorial_moment = a * a * shifted / self.normalizer;
        let mean = self.mean();
        factorial_moment + mean - mean * mean
    }

    /// `(eᵅ Bel_n(α) − Σ_{m≤r} αᵐ mⁿ / m!) / N`.
    pub fn moment(&self, n: u32) -> f64 {
        let a = self.alpha;
        let head: f64 = (0..=self.r as u64)
            .map(|m| a.powi(m as i32) * (m as f64).powi(n as i32) / factorial(m))
            .sum();
        (a.exp() * classical_bell(n as usize, a) - head) / self.normalizer
    }

    /// `(e^{αt} − Σ_{l≤r} (αt)ˡ/l!) / N`.
    pub fn pgf(&self, t: f64) -> f64 {
        if t > 0.0 {
            return ClassicalTruncatedPoisson::new(self.alpha * t, self.r).normalizer
                / self.normalizer;
        }
        let x = self.alpha * t;
        let head: f64 = (1..=self.r as u64)
            .map(|l| x.powi(l as i32) / factorial(l))
            .sum();
        (x.exp_m1() - head) / self.normalizer
    }
}

/// `ln(αᵏ/k!)`.
fn log_term(alpha: f64, k: u64) -> f64 {
    k as f64 * alpha.ln() - (1..=k).map(|j| (j as f64).ln()).sum::<f64>()
}
