//! Scalar primitives of the degenerate calculus.
//!
//! The degenerate exponential `e_λ^x(t) = (1 + λt)^{x/λ}` expands as
//! `Σ_k (x)_{k,λ} t^k / k!`, where `(x)_{k,λ} = x(x − λ)⋯(x − (k − 1)λ)` is the
//! degenerate falling factorial. As `λ → 0` both collapse to their classical
//! counterparts `e^{xt}` and `x^k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Below this magnitude of `λ`, [`deg_exp`] returns the classical limit `exp(xt)`.
pub const LAMBDA_SWITCH: f64 = 1e-8;

/// Tolerance, in units of `f64::EPSILON`, for recognising `λ = 1/m`.
pub const FINITE_SUPPORT_ULPS: f64 = 4.0;

/// The degenerate parameter `λ`. Any finite real; zero is the classical limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DegenerateLambda(f64);

impl DegenerateLambda {
    pub const ZERO: DegenerateLambda = DegenerateLambda(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite, got {value}"
            )));
        }
        Ok(DegenerateLambda(value))
    }

    /// `λ = p/q`, evaluated with a single correctly rounded division.
    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("lambda denominator is zero".into()));
        }
        Self::new(p as f64 / q as f64)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 0.0
    }
}

impl fmt::Display for DegenerateLambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Parses either a decimal literal (`"-0.25"`, `"1e-9"`) or a fraction `"p/q"`
/// with integer `p` and `q`.
impl FromStr for DegenerateLambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad numerator in lambda fraction {s:?}"))
            })?;
            let q: i64 = q.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad denominator in lambda fraction {s:?}"))
            })?;
            return Self::from_ratio(p, q);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse lambda {s:?}")))?;
        Self::new(v)
    }
}

/// The triple `(λ, α, r)` of an r-truncated degenerate Poisson law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionParams {
    lambda: DegenerateLambda,
    alpha: f64,
    r: u32,
}

impl DistributionParams {
    /// Checks `α > 0` (finite). Whether the triple is a genuine distribution is
    /// decided separately by [`classify_domain`].
    pub fn new(lambda: DegenerateLambda, alpha: f64, r: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be a finite positive number, got {alpha}"
            )));
        }
        Ok(DistributionParams { lambda, alpha, r })
    }

    #[inline]
    pub fn lambda(&self) -> DegenerateLambda {
        self.lambda
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn classify(&self) -> DomainClass {
        classify_domain(self)
    }
}

/// Where a parameter triple sits with respect to being a probability distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainClass {
    /// Support `{r+1, r+2, …}`, all masses positive.
    InfiniteSupport,
    /// `λ = 1/m`: support `{r+1, …, m}` since `(1)_{k,λ}` vanishes for `k > m`.
    FiniteSupport(u64),
    /// Not a distribution; the string names the violated condition.
    Invalid(String),
}

impl DomainClass {
    pub fn is_valid(&self) -> bool {
        !matches!(self, DomainClass::Invalid(_))
    }

    /// Largest support point, `None` when the support is unbounded or invalid.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            DomainClass::FiniteSupport(m) => Some(*m),
            _ => None,
        }
    }
}

/// `(x)_{n,λ} = x(x − λ)(x − 2λ)⋯(x − (n − 1)λ)`, with `(x)_{0,λ} = 1`.
pub fn falling_factorial(x: f64, n: u32, lambda: DegenerateLambda) -> f64 {
    let l = lambda.value();
    (0..n).fold(1.0, |acc, j| acc * (x - j as f64 * l))
}

/// The degenerate exponential `e_λ^x(t) = (1 + λt)^{x/λ}`.
///
/// Evaluated as `exp(x · log1p(λt) / λ)`; for `|λ| < LAMBDA_SWITCH` the
/// classical limit `exp(xt)` is returned instead. Fails with
/// [`Error::Domain`] when `λ ≠ 0` and `1 + λt ≤ 0`.
pub fn deg_exp(x: f64, t: f64, lambda: DegenerateLambda) -> Result<f64> {
    let l = lambda.value();
    if l != 0.0 && 1.0 + l * t <= 0.0 {
        return Err(Error::Domain(format!(
            "degenerate exponential undefined: 1 + λt = {} ≤ 0 (λ = {l}, t = {t})",
            1.0 + l * t
        )));
    }
    if l.abs() < LAMBDA_SWITCH {
        return Ok((x * t).exp());
    }
    Ok((x * (l * t).ln_1p() / l).exp())
}

/// The truncated degenerate exponential `e_{λ,r}(t) = Σ_{k=0}^{r} (1)_{k,λ} t^k / k!`.
pub fn deg_exp_truncated(t: f64, r: u32, lambda: DegenerateLambda) -> f64 {
    let l = lambda.value();
    // Horner: 1 + t/1·(1 + t(1−λ)/2·(1 + t(1−2λ)/3·(…)))
    (1..=r).rev().fold(1.0, |acc, k| {
        1.0 + acc * t * (1.0 - (k - 1) as f64 * l) / k as f64
    })
}

/// Decides whether `(λ, α, r)` gives nonnegative masses with a finite, positive
/// normalizer.
pub fn classify_domain(params: &DistributionParams) -> DomainClass {
    let l = params.lambda.value();
    let alpha = params.alpha;
    let r = params.r as u64;

    if l == 0.0 {
        return DomainClass::InfiniteSupport;
    }
    if l < 0.0 {
        return if alpha < 1.0 / -l {
            DomainClass::InfiniteSupport
        } else {
            DomainClass::Invalid(format!(
                "for negative lambda the rate must satisfy α < 1/|λ| = {}, got α = {alpha}",
                1.0 / -l
            ))
        };
    }

    let recip = (1.0 / l).round();
    if recip >= 1.0 && (l * recip - 1.0).abs() <= FINITE_SUPPORT_ULPS * f64::EPSILON {
        let m = recip as u64;
        return if m > r {
            DomainClass::FiniteSupport(m)
        } else {
            DomainClass::Invalid(format!(
                "λ = 1/{m} leaves no mass above the truncation point: need m ≥ r + 1 = {}",
                r + 1
            ))
        };
    }
    DomainClass::Invalid(format!(
        "positive lambda must be the reciprocal of an integer m ≥ r + 1; λ = {l} gives negative masses"
    ))
}
