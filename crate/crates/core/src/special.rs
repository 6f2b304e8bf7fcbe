//! Degenerate Bell polynomials and r-truncated degenerate Stirling numbers of
//! the second kind.
//!
//! The Stirling numbers are read off their exponential generating function
//!
//! ```text
//! (e_λ(t) − e_{λ,r}(t))^k / k! = Σ_{n ≥ k(r+1)} S^{[r]}_{2,λ}(n, k(r+1)) tⁿ/n!
//! ```
//!
//! by repeated EGF convolution of the truncated base series. With `r = 0` these
//! are the ordinary degenerate Stirling numbers `S_{2,λ}(n, k)`.

use std::collections::BTreeMap;

use crate::degenerate::{
    classify_domain, deg_exp, falling_factorial, DegenerateLambda, DistributionParams, DomainClass,
};
use crate::error::{Error, Result};

/// Largest order for which `n!` (and hence the Pascal triangle in doubles) is finite.
pub const MAX_ORDER: usize = 170;

/// Intermediate magnitudes above this flag a result as unreliable.
pub const OVERFLOW_THRESHOLD: f64 = 1e300;

/// Hard cap on the number of terms any infinite series in the crate will sum.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Smallest relative tolerance a double-precision running sum can honour.
pub const MIN_TOLERANCE: f64 = f64::EPSILON / 2.0;

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_nan() || tol < MIN_TOLERANCE {
        return Err(Error::Convergence(format!(
            "tolerance {tol:e} is below the double-precision resolution {MIN_TOLERANCE:e} and cannot be reached"
        )));
    }
    Ok(())
}

/// A finite prefix `Σ_{n ≤ N} c_n tⁿ/n!` of an exponential generating function.
///
/// Coefficients are stored as the ordinary values `c_n`; the `1/n!` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    coeffs: Vec<f64>,
}

impl CoefficientSeries {
    /// Panics if `coeffs` is empty: a series always carries at least `c_0`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a coefficient series has order ≥ 0");
        CoefficientSeries { coeffs }
    }

    pub fn zeros(order: usize) -> Self {
        CoefficientSeries {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// EGF product `(f·g)_n = Σ_j C(n, j) f_j g_{n−j}`, truncated to the smaller order.
    pub fn egf_mul(&self, other: &CoefficientSeries, binom: &PascalTriangle) -> CoefficientSeries {
        let order = self.order().min(other.order());
        assert!(
            order <= binom.order(),
            "binomial table too small for product"
        );
        let f = &self.coeffs;
        let g = &other.coeffs;
        let coeffs = (0..=order)
            .map(|n| {
                let row = binom.row(n);
                (0..=n).map(|j| row[j] * f[j] * g[n - j]).sum()
            })
            .collect();
        CoefficientSeries { coeffs }
    }

    fn scale(&mut self, by: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= by);
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Binomial coefficients `C(n, j)` for `n ≤ order` as doubles.
#[derive(Debug, Clone)]
pub struct PascalTriangle {
    rows: Vec<Vec<f64>>,
}

impl PascalTriangle {
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Overflow {
                requested: order,
                limit: MAX_ORDER,
            });
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        rows.push(vec![1.0]);
        for n in 1..=order {
            let prev = &rows[n - 1];
            let mut row = vec![1.0; n + 1];
            for j in 1..n {
                row[j] = prev[j - 1] + prev[j];
            }
            rows.push(row);
        }
        Ok(PascalTriangle { rows })
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }
}

/// Coefficients of `e_λ(t) − e_{λ,r}(t)`: `c_n = (1)_{n,λ}` for `n > r`, zero otherwise.
pub fn base_series(lambda: DegenerateLambda, r: u32, n_max: usize) -> CoefficientSeries {
    let coeffs = (0..=n_max)
        .map(|n| {
            if n as u64 > r as u64 {
                falling_factorial(1.0, n as u32, lambda)
            } else {
                0.0
            }
        })
        .collect();
    CoefficientSeries { coeffs }
}

/// One column `k` of the r-truncated degenerate Stirling triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingColumn {
    pub lambda: DegenerateLambda,
    pub r: u32,
    pub k: u32,
    /// `values[n] = S^{[r]}_{2,λ}(n, k(r+1))` for `n = 0..=n_max`.
    pub values: Vec<f64>,
    /// Set when some intermediate exceeded [`OVERFLOW_THRESHOLD`]; the exact
    /// oracle should be consulted for these parameters.
    pub overflow_warning: bool,
}

impl StirlingColumn {
    /// First index that can be nonzero, `k(r+1)`.
    pub fn first_index(&self) -> usize {
        self.k as usize * (self.r as usize + 1)
    }
}

fn check_order(n_max: usize) -> Result<()> {
    if n_max > MAX_ORDER {
        return Err(Error::Overflow {
            requested: n_max,
            limit: MAX_ORDER,
        });
    }
    Ok(())
}

/// Drives `(e_λ − e_{λ,r})^k / k!` for `k = 1, 2, …`, handing each power to `visit`.
fn for_each_power(
    lambda: DegenerateLambda,
    r: u32,
    k_max: u32,
    n_max: usize,
    mut visit: impl FnMut(u32, &CoefficientSeries, bool),
) -> Result<()> {
    check_order(n_max)?;
    let binom = PascalTriangle::new(n_max)?;
    let base = base_series(lambda, r, n_max);
    let mut power = base.clone();
    let mut overflow = power.max_abs() > OVERFLOW_THRESHOLD;
    for k in 1..=k_max {
        if k > 1 {
            // P_k = P_{k-1} · base / k keeps the 1/k! folded in as we go.
            power = power.egf_mul(&base, &binom);
            power.scale(1.0 / k as f64);
            overflow |= power.max_abs() > OVERFLOW_THRESHOLD;
        }
        // Coefficients below k(r+1) are structurally zero.
        let first = (k as usize * (r as usize + 1)).min(n_max + 1);
        power.coeffs[..first].iter_mut().for_each(|c| *c = 0.0);
        visit(k, &power, overflow);
    }
    Ok(())
}

/// `S^{[r]}_{2,λ}(n, k(r+1))` for `n = 0..=n_max`.
///
/// Entries below `n = k(r+1)` are exactly zero. Fails with [`Error::Overflow`]
/// when `n_max > MAX_ORDER`.
pub fn stirling_r_truncated(
    lambda: DegenerateLambda,
    r: u32,
    k: u32,
    n_max: usize,
) -> Result<StirlingColumn> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "stirling column index k must be ≥ 1".into(),
        ));
    }
    let mut out = None;
    for_each_power(lambda, r, k, n_max, |j, power, overflow| {
        if j == k {
            out = Some((power.coeffs().to_vec(), overflow));
        }
    })?;
    let (values, overflow_warning) = out.expect("k ≥ 1 visits at least once");
    Ok(StirlingColumn {
        lambda,
        r,
        k,
        values,
        overflow_warning,
    })
}

/// `S^{[r]}_{2,λ}(n, k(r+1))` over `n ≤ n_max`, `1 ≤ k ≤ k_max`. Immutable once built.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    lambda: DegenerateLambda,
    r: u32,
    n_max: usize,
    k_max: u32,
    values: BTreeMap<(usize, u32), f64>,
    overflow_warning: bool,
}

impl StirlingTable {
    pub fn new(lambda: DegenerateLambda, r: u32, n_max: usize, k_max: u32) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut overflow_warning = false;
        for_each_power(lambda, r, k_max, n_max, |k, power, overflow| {
            overflow_warning |= overflow;
            let first = k as usize * (r as usize + 1);
            for n in first..=n_max {
                values.insert((n, k), power.coeffs()[n]);
            }
        })?;
        Ok(StirlingTable {
            lambda,
            r,
            n_max,
            k_max,
            values,
            overflow_warning,
        })
    }

    pub fn lambda(&self) -> DegenerateLambda {
        self.lambda
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn overflow_warning(&self) -> bool {
        self.overflow_warning
    }

    /// `S^{[r]}_{2,λ}(n, k(r+1))`; zero below the first index, `None` outside the table.
    pub fn get(&self, n: usize, k: u32) -> Option<f64> {
        if n > self.n_max || k == 0 || k > self.k_max {
            return None;
        }
        Some(self.values.get(&(n, k)).copied().unwrap_or(0.0))
    }

    /// Stored entries in `(n, k)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, u32), f64)> + '_ {
        self.values.iter().map(|(&key, &v)| (key, v))
    }
}

/// The degenerate Bell polynomial `Bel_{n,λ}(x)`, the coefficient of `tⁿ/n!`
/// in `e_λ^{-1}(x) e_λ(x eᵗ)`.
///
/// Evaluated through its Dobinski-type series
/// `e_λ^{-1}(x) Σ_{m≥0} (1)_{m,λ} xᵐ mⁿ / m!` with `0⁰ = 1`. Summation stops
/// once three consecutive, decreasing terms each fall below `tol` times the
/// running sum.
///
/// Defined for `x > 0` when the series terminates (`λ = 1/m`) or converges
/// absolutely (`λ = 0` or `|λ|x < 1`); anything else is an [`Error::Domain`].
pub fn degenerate_bell(n: u32, x: f64, lambda: DegenerateLambda, tol: f64) -> Result<f64> {
    check_tolerance(tol)?;
    let params = DistributionParams::new(lambda, x, 0).map_err(|_| {
        Error::Domain(format!(
            "Bell polynomial argument must be positive, got {x}"
        ))
    })?;
    let l = lambda.value();
    let support_max = match classify_domain(&params) {
        DomainClass::FiniteSupport(m) => Some(m),
        _ if l == 0.0 || l.abs() * x < 1.0 => None,
        _ => {
            return Err(Error::Domain(format!(
                "Dobinski series for Bel_n,λ(x) diverges at λ = {l}, x = {x} (need |λ|x < 1 or λ = 1/m)"
            )))
        }
    };
    let e = deg_exp(1.0, x, lambda)?;
    Ok(dobinski_sum(n, x, lambda, support_max, tol)? / e)
}

/// `Σ_m (1)_{m,λ} xᵐ mⁿ / m!`, finite when `support_max` is given.
pub(crate) fn dobinski_sum(
    n: u32,
    x: f64,
    lambda: DegenerateLambda,
    support_max: Option<u64>,
    tol: f64,
) -> Result<f64> {
    let l = lambda.value();
    let mut weight = 1.0;
    let mut sum = 0.0;
    let mut prev_term = f64::INFINITY;
    let mut small_run = 0;
    for m in 0..=MAX_SERIES_TERMS {
        let term = weight * (m as f64).powi(n as i32);
        sum += term;
        if support_max == Some(m as u64) {
            return Ok(sum);
        }
        if term.abs() < tol * sum.abs() && term.abs() <= prev_term.abs() {
            small_run += 1;
            if small_run == 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        prev_term = term;
        weight *= x * (1.0 - m as f64 * l) / (m + 1) as f64;
    }
    Err(Error::Convergence(format!(
        "Dobinski series for Bel_{n},λ({x}) did not reach tolerance {tol:e} within {MAX_SERIES_TERMS} terms"
    )))
}
