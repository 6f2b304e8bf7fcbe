//! The r-truncated degenerate Poisson random variable.
//!
//! `X` takes values in `{r+1, r+2, …}` with
//!
//! ```text
//! P(X = k) = (1)_{k,λ} αᵏ / (k! · (e_λ(α) − e_{λ,r}(α)))
//! ```
//!
//! which reduces to the classical r-truncated Poisson law at `λ = 0`. Only
//! parameter triples that [`classify_domain`] accepts can be constructed.

use serde::{Deserialize, Serialize};

use crate::degenerate::{
    classify_domain, deg_exp, deg_exp_truncated, falling_factorial, DistributionParams, DomainClass,
};
use crate::error::{Error, Result};
use crate::special::{
    check_tolerance, degenerate_bell, stirling_r_truncated, MAX_ORDER, MAX_SERIES_TERMS,
};

/// Relative size of the neglected tail when the normalizer series is cut off.
pub const NORMALIZER_TAIL: f64 = 1e-16;

/// A validated r-truncated degenerate Poisson law. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDegenPoisson {
    params: DistributionParams,
    domain: DomainClass,
    normalizer: f64,
}

impl TruncatedDegenPoisson {
    /// Fails with [`Error::InvalidParams`] when the triple is not a distribution.
    pub fn new(params: DistributionParams) -> Result<Self> {
        let domain = classify_domain(&params);
        if let DomainClass::Invalid(reason) = domain {
            return Err(Error::InvalidParams(reason));
        }
        let normalizer = tail_normalizer(&params, &domain)?;
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "normalizer e_λ(α) − e_λ,r(α) = {normalizer:e} is not a positive finite number"
            )));
        }
        Ok(TruncatedDegenPoisson {
            params,
            domain,
            normalizer,
        })
    }

    pub fn params(&self) -> &DistributionParams {
        &self.params
    }

    pub fn domain(&self) -> &DomainClass {
        &self.domain
    }

    /// `e_λ(α) − e_{λ,r}(α)`, summed as the tail series `Σ_{k>r} (1)_{k,λ} αᵏ/k!`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Smallest support point `r + 1`.
    pub fn support_min(&self) -> u64 {
        self.params.r() as u64 + 1
    }

    /// Largest support point in the finite-support case.
    pub fn support_max(&self) -> Option<u64> {
        self.domain.support_max()
    }

    pub fn in_support(&self, k: u64) -> bool {
        k >= self.support_min() && self.support_max().is_none_or(|m| k <= m)
    }

    /// `p(k+1) / p(k) = α(1 − kλ)/(k + 1)`.
    #[inline]
    pub fn mass_ratio(&self, k: u64) -> f64 {
        mass_ratio(&self.params, k)
    }

    /// `P(X = i)`; exactly zero outside the support.
    pub fn pmf(&self, i: u64) -> f64 {
        if !self.in_support(i) {
            return 0.0;
        }
        series_weight(&self.params, i) / self.normalizer
    }

    /// Support points and their masses in increasing order, generated by the
    /// ratio recursion. Endless for unbounded support.
    pub fn masses(&self) -> Masses<'_> {
        let k = self.support_min();
        Masses {
            dist: self,
            k,
            p: self.pmf(k),
        }
    }

    /// `P(X ≤ x) = (e_{λ,⌊x⌋}(α) − e_{λ,r}(α)) / (e_λ(α) − e_{λ,r}(α))`.
    ///
    /// The numerator is accumulated as `Σ_{k=r+1}^{⌊x⌋} (1)_{k,λ} αᵏ/k!` rather
    /// than as a difference of truncated exponentials. Zero below `r + 1`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let first = self.support_min();
        if x < first as f64 {
            return 0.0;
        }
        let top = x.floor();
        if let Some(m) = self.support_max() {
            if top >= m as f64 {
                return 1.0;
            }
        }
        let limit = self.limit_ratio();
        let mut k = first;
        let mut w = series_weight(&self.params, first);
        let mut sum = 0.0;
        while (k as f64) <= top {
            sum += w;
            let ratio = self.mass_ratio(k);
            let rho = ratio.max(limit);
            // Once the rest of the tail cannot move the sum, stop walking.
            if rho < 1.0 && w * rho / (1.0 - rho) <= sum * f64::EPSILON / 4.0 {
                break;
            }
            w *= ratio;
            k += 1;
        }
        (sum / self.normalizer).min(1.0)
    }

    /// `E[X] = (α + A) / (1 + αλ)` with `A = (α^{r+1}/r!) (1)_{r+1,λ} / normalizer`.
    pub fn mean(&self) -> f64 {
        let alpha = self.params.alpha();
        let a = self.truncation_term();
        (alpha + a) / (1.0 + alpha * self.params.lambda().value())
    }

    /// `(α + A)(1 − A)/(1 + αλ)² + r·A/(1 + αλ)`, with `A` as in [`mean`](Self::mean).
    ///
    /// On a one-point support the two terms cancel to rounding level; the
    /// result is clamped at zero.
    pub fn variance(&self) -> f64 {
        let alpha = self.params.alpha();
        let a = self.truncation_term();
        let d = 1.0 + alpha * self.params.lambda().value();
        ((alpha + a) * (1.0 - a) / (d * d) + self.params.r() as f64 * a / d).max(0.0)
    }

    /// `A = (α^{r+1}/r!) (1)_{r+1,λ} / (e_λ(α) − e_{λ,r}(α))`.
    fn truncation_term(&self) -> f64 {
        let alpha = self.params.alpha();
        let r = self.params.r();
        let pow_over_fact = (1..=r).fold(alpha, |acc, j| acc * alpha / j as f64);
        pow_over_fact * falling_factorial(1.0, r + 1, self.params.lambda()) / self.normalizer
    }

    /// `E[Xⁿ] = e_λ(α)/normalizer · (Bel_{n,λ}(α) − e_λ^{-1}(α) Σ_{m=0}^{r} (αᵐ/m!)(1)_{m,λ} mⁿ)`.
    ///
    /// `n = 0` is exactly 1. `tol` is passed to the Bell-polynomial series.
    pub fn moment(&self, n: u32, tol: f64) -> Result<f64> {
        check_tolerance(tol)?;
        if n == 0 {
            return Ok(1.0);
        }
        let alpha = self.params.alpha();
        let lambda = self.params.lambda();
        let e = deg_exp(1.0, alpha, lambda)?;
        let bell = degenerate_bell(n, alpha, lambda, tol)?;
        let mut weight = 1.0;
        let mut head = 0.0;
        for m in 0..=self.params.r() as u64 {
            head += weight * (m as f64).powi(n as i32);
            weight *= self.mass_ratio(m);
        }
        Ok(e / self.normalizer * (bell - head / e))
    }

    /// Closed-form moments `E[X⁰..X^order]` together with mean and variance.
    pub fn moment_report(&self, order: u32, tol: f64) -> Result<MomentReport> {
        let moments = (0..=order)
            .map(|n| self.moment(n, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentReport {
            order,
            mean: self.mean(),
            variance: self.variance(),
            moments,
            oracle_moments: None,
            relative_deviation: None,
        })
    }

    /// Probability generating function `E[tˣ] = (e_λ(αt) − e_{λ,r}(αt)) / normalizer`.
    ///
    /// Fails with [`Error::Domain`] when `1 + λαt ≤ 0` for unbounded support.
    pub fn pgf(&self, t: f64) -> Result<f64> {
        let alpha = self.params.alpha();
        let l = self.params.lambda().value();
        let r = self.params.r();
        let first = self.support_min();
        let base = series_weight(&self.params, first);

        let support_max = self.support_max();
        if support_max.is_none() && l != 0.0 && 1.0 + l * alpha * t <= 0.0 {
            return Err(Error::Domain(format!(
                "pgf undefined at t = {t}: 1 + λαt = {} ≤ 0",
                1.0 + l * alpha * t
            )));
        }
        let limit = self.limit_ratio() * t.abs();
        if limit >= 1.0 {
            // Outside the disc of convergence of the tail series.
            let x = alpha * t;
            let lambda = self.params.lambda();
            return Ok(
                (deg_exp(1.0, x, lambda)? - deg_exp_truncated(x, r, lambda)) / self.normalizer
            );
        }
        let mut k = first;
        let mut w = base * t.powi(first as i32);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for _ in 0..MAX_SERIES_TERMS {
            sum += w;
            abs_sum += w.abs();
            if support_max == Some(k) {
                return Ok(sum / self.normalizer);
            }
            let ratio = self.mass_ratio(k) * t;
            let rho = ratio.abs().max(limit);
            if w == 0.0 || (rho < 1.0 && w.abs() * rho / (1.0 - rho) <= abs_sum * NORMALIZER_TAIL) {
                return Ok(sum / self.normalizer);
            }
            w *= ratio;
            k += 1;
        }
        Err(Error::Convergence(format!(
            "pgf series at t = {t} did not converge"
        )))
    }

    /// Exact law of the sum of `k` independent copies, for sums `n ≤ n_max`.
    pub fn sum_distribution(&self, k: u32, n_max: usize) -> Result<SumDistribution> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "number of summands must be ≥ 1".into(),
            ));
        }
        let r = self.params.r();
        let first = k as usize * (r as usize + 1);
        if n_max < first {
            return Err(Error::InvalidArgument(format!(
                "n_max = {n_max} is below the smallest possible sum k(r+1) = {first}"
            )));
        }
        if n_max > MAX_ORDER {
            return Err(Error::Overflow {
                requested: n_max,
                limit: MAX_ORDER,
            });
        }
        let stirling = stirling_r_truncated(self.params.lambda(), r, k, n_max)?;
        let alpha = self.params.alpha();

        // k!/N^k · αⁿ/n! = k! (α^{r+1}/N)^k / (k(r+1))! · Π_{j=k(r+1)+1}^{n} α/j
        let q = alpha.powi(r as i32 + 1) / self.normalizer;
        let mut scale = (1..=k).fold(1.0, |acc, j| acc * j as f64 * q);
        scale = (1..=first).fold(scale, |acc, j| acc / j as f64);

        let mut masses = vec![0.0; n_max + 1];
        for (n, mass) in masses.iter_mut().enumerate().skip(first) {
            if n > first {
                scale *= alpha / n as f64;
            }
            *mass = scale * stirling.values[n];
        }
        Ok(SumDistribution {
            k,
            params: self.params,
            masses,
            overflow_warning: stirling.overflow_warning,
        })
    }

    /// `α·max(−λ, 0)`: the limit of the mass ratio as `k → ∞` (unbounded support).
    fn limit_ratio(&self) -> f64 {
        self.params.alpha() * (-self.params.lambda().value()).max(0.0)
    }
}

/// Iterator returned by [`TruncatedDegenPoisson::masses`].
#[derive(Debug, Clone)]
pub struct Masses<'a> {
    dist: &'a TruncatedDegenPoisson,
    k: u64,
    p: f64,
}

impl Iterator for Masses<'_> {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<(u64, f64)> {
        if !self.dist.in_support(self.k) {
            return None;
        }
        let out = (self.k, self.p);
        self.p *= self.dist.mass_ratio(self.k);
        self.k += 1;
        Some(out)
    }
}

/// Law of `X⁽¹⁾ + … + X⁽ᵏ⁾` for i.i.d. copies.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDistribution {
    pub k: u32,
    pub params: DistributionParams,
    /// `masses[n] = P(ΣX = n)` for `n = 0..=n_max`, zero below `k(r+1)`.
    pub masses: Vec<f64>,
    pub overflow_warning: bool,
}

impl SumDistribution {
    pub fn first_index(&self) -> usize {
        self.k as usize * (self.params.r() as usize + 1)
    }

    pub fn n_max(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn mass(&self, n: usize) -> f64 {
        self.masses.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Sum law for i.i.d. copies with the given parameters.
pub fn iid_sum_distribution(
    params: DistributionParams,
    k: u32,
    n_max: usize,
) -> Result<SumDistribution> {
    TruncatedDegenPoisson::new(params)?.sum_distribution(k, n_max)
}

/// Closed-form moments with optional oracle values for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: u32,
    pub mean: f64,
    pub variance: f64,
    /// `moments[n] = E[Xⁿ]` for `n = 0..=order`.
    pub moments: Vec<f64>,
    pub oracle_moments: Option<Vec<f64>>,
    pub relative_deviation: Option<Vec<f64>>,
}

impl MomentReport {
    /// Records independently computed moments and the per-order relative deviation.
    pub fn attach_oracle(&mut self, oracle: Vec<f64>) {
        let dev = self
            .moments
            .iter()
            .zip(&oracle)
            .map(|(&a, &b)| relative_deviation(a, b))
            .collect();
        self.oracle_moments = Some(oracle);
        self.relative_deviation = Some(dev);
    }
}

/// `|a − b| / max(|a|, |b|)`, zero when the two are equal.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[inline]
fn mass_ratio(params: &DistributionParams, k: u64) -> f64 {
    params.alpha() * (1.0 - k as f64 * params.lambda().value()) / (k + 1) as f64
}

/// `(1)_{i,λ} αⁱ / i!` as the product of successive mass ratios.
fn series_weight(params: &DistributionParams, i: u64) -> f64 {
    let mut w = 1.0;
    for j in 0..i {
        w *= mass_ratio(params, j);
        if w == 0.0 {
            break;
        }
    }
    w
}

fn tail_normalizer(params: &DistributionParams, domain: &DomainClass) -> Result<f64> {
    let first = params.r() as u64 + 1;
    let support_max = domain.support_max();
    // Every ratio from k on lies between ratio(k) and the limit α·max(−λ, 0),
    // so the geometric bound below dominates the remaining tail. With λ = 1/m
    // the ratios only decrease, and m can be far out (λ = 1e-9 gives m = 10⁹).
    let limit = params.alpha() * (-params.lambda().value()).max(0.0);
    let mut w = series_weight(params, first);
    let mut sum = 0.0;
    let mut k = first;
    for _ in 0..MAX_SERIES_TERMS {
        sum += w;
        if support_max == Some(k) {
            return Ok(sum);
        }
        let ratio = mass_ratio(params, k);
        let rho = ratio.max(limit);
        if w == 0.0 || (rho < 1.0 && w * rho / (1.0 - rho) <= sum * NORMALIZER_TAIL) {
            return Ok(sum);
        }
        w *= ratio;
        k += 1;
    }
    Err(Error::Convergence(format!(
        "normalizer series did not converge within {MAX_SERIES_TERMS} terms"
    )))
}
