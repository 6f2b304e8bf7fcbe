//! Exact-rational reference values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

pub fn rational(p: i64, q: i64) -> ExactRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The exact value of a finite double.
pub fn rational_from_f64(x: f64) -> Option<ExactRational> {
    BigRational::from_float(x)
}

/// Nearest double, ties to even.
pub fn to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn exact_falling_factorial(x: &ExactRational, n: u32, lambda: &ExactRational) -> ExactRational {
    let mut acc = ExactRational::one();
    let mut shift = ExactRational::zero();
    for _ in 0..n {
        acc *= x - &shift;
        shift += lambda;
    }
    acc
}

fn binomial_rows(n_max: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = vec![BigInt::one(); n + 1];
        for j in 1..n {
            row[j] = &prev[j - 1] + &prev[j];
        }
        rows.push(row);
    }
    rows
}

/// `S^{[r]}_{2,λ}(n, k(r+1))` for `n = 0..=n_max` in exact arithmetic: the
/// `k`-th EGF power of `e_λ(t) − e_{λ,r}(t)`, divided by `k!`.
pub fn exact_stirling_r_truncated(
    lambda: &ExactRational,
    r: u32,
    k: u32,
    n_max: usize,
) -> Vec<ExactRational> {
    assert!(k >= 1, "column index k must be ≥ 1");
    exact_stirling_table(lambda, r, k, n_max)
        .pop()
        .expect("k ≥ 1 columns")
}

/// Columns `k = 1..=k_max` of [`exact_stirling_r_truncated`]; entry `[k−1][n]`.
pub fn exact_stirling_table(
    lambda: &ExactRational,
    r: u32,
    k_max: u32,
    n_max: usize,
) -> Vec<Vec<ExactRational>> {
    let one = ExactRational::one();
    let base: Vec<ExactRational> = (0..=n_max)
        .map(|n| {
            if n > r as usize {
                exact_falling_factorial(&one, n as u32, lambda)
            } else {
                ExactRational::zero()
            }
        })
        .collect();
    let binom = binomial_rows(n_max);
    let mut columns = Vec::with_capacity(k_max as usize);
    let mut power = base.clone();
    let mut k_fact = BigInt::one();
    for k in 1..=k_max {
        if k > 1 {
            power = (0..=n_max)
                .map(|n| {
                    let mut acc = ExactRational::zero();
                    for j in 0..=n {
                        if power[j].is_zero() || base[n - j].is_zero() {
                            continue;
                        }
                        acc += ExactRational::from_integer(binom[n][j].clone())
                            * &power[j]
                            * &base[n - j];
                    }
                    acc
                })
                .collect();
        }
        k_fact *= BigInt::from(k);
        let divisor = ExactRational::from_integer(k_fact.clone());
        columns.push(power.iter().map(|c| c / &divisor).collect());
    }
    columns
}

/// Degenerate Stirling numbers `S_{2,λ}(n, k)` from the triangular recurrence
/// `S(n+1, k) = S(n, k−1) + (k − nλ) S(n, k)`, `S(0, 0) = 1`.
///
/// Returns rows `0..=n_max`, each of length `k_max + 1`. Works for any field:
/// `f64` for a quick check, [`ExactRational`] for exact comparison.
pub fn classical_recurrence_stirling<T>(lambda: T, n_max: usize, k_max: usize) -> Vec<Vec<T>>
where
    T: Num + Clone + FromPrimitive,
{
    let mut rows = vec![vec![T::zero(); k_max + 1]; n_max + 1];
    rows[0][0] = T::one();
    for n in 0..n_max {
        let n_lambda = T::from_usize(n).expect("index fits") * lambda.clone();
        for k in 0..=k_max {
            let stay =
                (T::from_usize(k).expect("index fits") - n_lambda.clone()) * rows[n][k].clone();
            let enter = if k > 0 {
                rows[n][k - 1].clone()
            } else {
                T::zero()
            };
            rows[n + 1][k] = enter + stay;
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_examples() {
        let third = rational(1, 3);
        assert_eq!(
            exact_stirling_r_truncated(&third, 0, 1, 3)[3],
            rational(2, 9)
        );
        assert_eq!(
            exact_stirling_r_truncated(&rational(0, 1), 0, 2, 3)[3],
            rational(3, 1)
        );
        for l in [rational(1, 3), rational(-1, 4), rational(2, 7)] {
            let v = &exact_stirling_r_truncated(&l, 1, 2, 4)[4];
            let one_minus = ExactRational::one() - &l;
            assert_eq!(*v, rational(3, 1) * &one_minus * &one_minus);
        }
    }

    #[test]
    fn recurrence_diagonal_and_first_column() {
        let l = rational(-1, 4);
        let t = classical_recurrence_stirling(l.clone(), 12, 12);
        for n in 0..=12 {
            assert_eq!(t[n][n], ExactRational::one());
            if n >= 1 {
                assert_eq!(
                    t[n][1],
                    exact_falling_factorial(&ExactRational::one(), n as u32, &l)
                );
            }
        }
    }

    #[test]
    fn conversion_rounds_to_nearest() {
        assert_eq!(to_f64(&rational(1, 3)), 1.0 / 3.0);
        assert_eq!(to_f64(&rational(2, 9)), 2.0 / 9.0);
        assert_eq!(rational_from_f64(0.25), Some(rational(1, 4)));
        let x = 0.1f64;
        assert_eq!(to_f64(&rational_from_f64(x).unwrap()), x);
    }
}
