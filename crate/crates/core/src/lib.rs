//! The r-truncated degenerate Poisson distribution and the special functions
//! behind it.
//!
//! A random variable `X` with parameters `λ` (degenerate parameter), `α > 0`
//! (rate) and `r ≥ 0` (truncation order) takes the values `r+1, r+2, …` with
//!
//! ```text
//! P(X = k) = (1)_{k,λ} αᵏ / (k! · (e_λ(α) − e_{λ,r}(α)))
//! ```
//!
//! where `(1)_{k,λ} = 1·(1 − λ)⋯(1 − (k−1)λ)`, `e_λ(t) = (1 + λt)^{1/λ}` and
//! `e_{λ,r}` is the degree-`r` partial sum of `e_λ`. At `λ = 0` this is the
//! classical r-truncated Poisson law.
//!
//! ```
//! use degenerate_poisson::{DegenerateLambda, DistributionParams, TruncatedDegenPoisson};
//!
//! let lambda: DegenerateLambda = "1/3".parse()?;
//! let dist = TruncatedDegenPoisson::new(DistributionParams::new(lambda, 3.0, 0)?)?;
//!
//! // λ = 1/3 cuts the support off at 3: masses 3/7, 3/7, 1/7.
//! assert_eq!(dist.support_max(), Some(3));
//! assert!((dist.pmf(2) - 3.0 / 7.0).abs() < 1e-15);
//! assert!((dist.mean() - 12.0 / 7.0).abs() < 1e-15);
//! assert!((dist.variance() - 24.0 / 49.0).abs() < 1e-15);
//! # Ok::<(), degenerate_poisson::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`degenerate`]: degenerate falling factorials and exponentials, parameter
//!   classification.
//! - [`special`]: degenerate Bell polynomials, r-truncated degenerate Stirling
//!   numbers of the second kind.
//! - [`distribution`]: pmf, cdf, moments, pgf and the law of i.i.d. sums.
//! - [`sampling`]: seeded inverse-transform sampling.
//! - [`oracles`]: independent brute-force references used for verification.
//!
//! The guide in `book/` walks through each piece; its code samples are
//! compiled and run as doctests of this crate.

pub mod degenerate;
pub mod distribution;
mod error;
pub mod oracles;
pub mod sampling;
pub mod special;

pub use degenerate::{
    classify_domain, deg_exp, deg_exp_truncated, falling_factorial, DegenerateLambda,
    DistributionParams, DomainClass,
};
pub use distribution::{
    iid_sum_distribution, relative_deviation, MomentReport, SumDistribution, TruncatedDegenPoisson,
};
pub use error::{Error, Result};
pub use sampling::{SampleBatch, SamplerState};
pub use special::{
    base_series, degenerate_bell, stirling_r_truncated, CoefficientSeries, StirlingColumn,
    StirlingTable,
};

// The book's chapters, compiled as doctests so their snippets stay honest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/degenerate-calculus.md")]
    mod degenerate_calculus {}
    #[doc = include_str!("../../../book/src/special-numbers.md")]
    mod special_numbers {}
    #[doc = include_str!("../../../book/src/distribution.md")]
    mod distribution {}
    #[doc = include_str!("../../../book/src/sums.md")]
    mod sums {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
