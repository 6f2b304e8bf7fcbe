//! Acceptance suite. Runs as a plain binary so every criterion prints its own
//! PASS/FAIL line whether or not output capture is on.

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use degenerate_poisson::oracles::{
    classical_recurrence_stirling, convolve_pmf, exact_stirling_table, rational, series_moment,
    to_f64, ClassicalTruncatedPoisson, ExactRational,
};
use degenerate_poisson::{
    relative_deviation, stirling_r_truncated, DegenerateLambda, DistributionParams, SamplerState,
    TruncatedDegenPoisson,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const LAMBDAS: [(i64, i64); 5] = [(0, 1), (-1, 5), (-1, 4), (1, 5), (1, 3)];
const ALPHAS: [f64; 3] = [0.5, 1.0, 3.0];
const RS: [u32; 4] = [0, 1, 2, 5];
const SERIES_TOL: f64 = 1e-15;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn lambda(p: i64, q: i64) -> DegenerateLambda {
    DegenerateLambda::from_ratio(p, q).unwrap()
}

/// Every valid (λ, α, r) combination of the acceptance grid.
fn grid() -> Vec<TruncatedDegenPoisson> {
    let mut out = Vec::new();
    for &(p, q) in &LAMBDAS {
        for &alpha in &ALPHAS {
            for &r in &RS {
                let params = DistributionParams::new(lambda(p, q), alpha, r).unwrap();
                if params.classify().is_valid() {
                    out.push(TruncatedDegenPoisson::new(params).unwrap());
                }
            }
        }
    }
    out
}

fn label(d: &TruncatedDegenPoisson) -> String {
    let p = d.params();
    format!("λ={} α={} r={}", p.lambda(), p.alpha(), p.r())
}

/// Support points from r+1 until the cumulative mass reaches `1 − 1e−10`.
fn covered_support(d: &TruncatedDegenPoisson) -> Vec<u64> {
    let mut out = Vec::new();
    let mut total = 0.0;
    for (k, p) in d.masses() {
        out.push(k);
        total += p;
        if total >= 1.0 - 1e-10 {
            break;
        }
    }
    out
}

/// Tracks the largest deviation seen and where it happened.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            at: String::from("-"),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn normalization() -> Outcome {
    let ((worst, points), elapsed) = timed(|| {
        let mut worst = Worst::new();
        let points = grid();
        for d in &points {
            // unbounded supports run until the masses leave the normal range
            let total: f64 = d
                .masses()
                .map(|(_, p)| p)
                .take_while(|&p| p >= f64::MIN_POSITIVE)
                .sum();
            worst.update((total - 1.0).abs(), || label(d));
        }
        (worst, points.len())
    });
    let passed = worst.value <= 1e-12 && elapsed < Duration::from_secs(1);
    outcome(
        passed,
        format!(
            "{points} grid points, max |Σpmf − 1| = {:.2e} at {}, {elapsed:.2?}",
            worst.value, worst.at
        ),
    )
}

/// On a one-point support the variance is zero in exact arithmetic, and the
/// closed form returns it as a difference of two numbers of size `E[X²]`. There
/// both sides count as equal once they agree to `8ε·E[X²]`.
fn variance_deviation(d: &TruncatedDegenPoisson, a: f64, b: f64, second_moment: f64) -> f64 {
    let one_point = d.support_max() == Some(d.support_min());
    if one_point && (a - b).abs() <= 8.0 * f64::EPSILON * second_moment {
        0.0
    } else {
        relative_deviation(a, b)
    }
}

fn mean_variance() -> Outcome {
    let ((mean_worst, var_worst, exact), elapsed) = timed(|| {
        let mut mean_worst = Worst::new();
        let mut var_worst = Worst::new();
        for d in &grid() {
            let m1 = series_moment(d.params(), 1, SERIES_TOL).unwrap();
            let m2 = series_moment(d.params(), 2, SERIES_TOL).unwrap();
            mean_worst.update(relative_deviation(d.mean(), m1), || label(d));
            var_worst.update(
                variance_deviation(d, d.variance(), m2 - m1 * m1, m2),
                || label(d),
            );
        }
        let worked = worked_example();
        let exact = relative_deviation(worked.mean(), 12.0 / 7.0)
            .max(relative_deviation(worked.variance(), 24.0 / 49.0));
        (mean_worst, var_worst, exact)
    });
    let passed = mean_worst.value <= 1e-10
        && var_worst.value <= 1e-10
        && exact <= 1e-14
        && elapsed < Duration::from_secs(1);
    outcome(
        passed,
        format!(
            "mean {:.2e} at {}, variance {:.2e} at {}, worked point {exact:.2e}, {elapsed:.2?}",
            mean_worst.value, mean_worst.at, var_worst.value, var_worst.at
        ),
    )
}

fn moments() -> Outcome {
    let ((worst, zeroth_exact), elapsed) = timed(|| {
        let mut worst = Worst::new();
        let mut zeroth_exact = true;
        for d in &grid() {
            zeroth_exact &= d.moment(0, SERIES_TOL).unwrap() == 1.0;
            for n in 1..=6 {
                let closed = d.moment(n, SERIES_TOL).unwrap();
                let direct = series_moment(d.params(), n, SERIES_TOL).unwrap();
                worst.update(relative_deviation(closed, direct), || {
                    format!("{} n={n}", label(d))
                });
            }
        }
        (worst, zeroth_exact)
    });
    let passed = worst.value <= 1e-9 && zeroth_exact && elapsed < Duration::from_secs(5);
    outcome(
        passed,
        format!(
            "max deviation {:.2e} at {}, E[X⁰] exactly 1: {zeroth_exact}, {elapsed:.2?}",
            worst.value, worst.at
        ),
    )
}

fn cdf() -> Outcome {
    let mut worst = Worst::new();
    let mut points = 0;
    for d in &grid() {
        let mut running = 0.0;
        for k in covered_support(d) {
            running += d.pmf(k);
            points += 1;
            worst.update((d.cdf(k as f64) - running).abs(), || {
                format!("{} k={k}", label(d))
            });
        }
    }
    outcome(
        worst.value <= 1e-13,
        format!(
            "{points} support points, max abs error {:.2e} at {}",
            worst.value, worst.at
        ),
    )
}

fn sum_distribution() -> Outcome {
    const N_MAX: usize = 30;
    let ((worst, lowest), elapsed) = timed(|| {
        let mut worst = Worst::new();
        let mut lowest = Worst::new();
        for d in &grid() {
            let first = d.support_min();
            for k in 1..=4u32 {
                let sums = d.sum_distribution(k, N_MAX).unwrap();
                let conv = convolve_pmf(d.params(), k, N_MAX).unwrap();
                for (n, &c) in conv.iter().enumerate() {
                    worst.update(relative_deviation(sums.mass(n), c), || {
                        format!("{} k={k} n={n}", label(d))
                    });
                }
                let expected = d.pmf(first).powi(k as i32);
                lowest.update(
                    relative_deviation(sums.mass(sums.first_index()), expected),
                    || format!("{} k={k}", label(d)),
                );
            }
        }
        (worst, lowest)
    });
    let passed = worst.value <= 1e-10 && lowest.value <= 1e-12 && elapsed < Duration::from_secs(10);
    outcome(
        passed,
        format!(
            "vs convolution {:.2e} at {}, lowest index {:.2e} at {}, {elapsed:.2?}",
            worst.value,
            worst.at,
            lowest.value,
            lowest.at,
            elapsed = elapsed
        ),
    )
}

fn stirling() -> Outcome {
    const N_MAX: usize = 25;
    const K_MAX: u32 = 6;
    let ((worst, recurrence_exact), elapsed) = timed(|| {
        let mut worst = Worst::new();
        let mut recurrence_exact = true;
        for (p, q) in [(0, 1), (1, 3), (-1, 4)] {
            let exact_lambda = rational(p, q);
            for r in 0..=3u32 {
                let exact = exact_stirling_table(&exact_lambda, r, K_MAX, N_MAX);
                for k in 1..=K_MAX {
                    let column = stirling_r_truncated(lambda(p, q), r, k, N_MAX).unwrap();
                    for n in 0..=N_MAX {
                        let oracle = to_f64(&exact[k as usize - 1][n]);
                        worst.update(relative_deviation(column.values[n], oracle), || {
                            format!("λ={p}/{q} r={r} k={k} n={n}")
                        });
                    }
                }
                if r == 0 {
                    let rows = classical_recurrence_stirling::<ExactRational>(
                        exact_lambda.clone(),
                        N_MAX,
                        K_MAX as usize,
                    );
                    for k in 1..=K_MAX as usize {
                        for n in 0..=N_MAX {
                            recurrence_exact &= rows[n][k] == exact[k - 1][n];
                        }
                    }
                }
            }
        }
        (worst, recurrence_exact)
    });
    let passed = worst.value <= 1e-12 && recurrence_exact && elapsed < Duration::from_secs(10);
    outcome(
        passed,
        format!(
            "double vs exact {:.2e} at {}, r=0 slice equals recurrence: {recurrence_exact}, {elapsed:.2?}",
            worst.value, worst.at
        ),
    )
}

fn classical_limit() -> Outcome {
    const LAMBDA: f64 = 1e-9;
    let mut worst = Worst::new();
    let mut pmf_worst = Worst::new();
    let mut predicted = 0.0;
    for &alpha in &ALPHAS {
        for &r in &RS {
            let params =
                DistributionParams::new(DegenerateLambda::new(LAMBDA).unwrap(), alpha, r).unwrap();
            let d = TruncatedDegenPoisson::new(params).unwrap();
            let c = ClassicalTruncatedPoisson::new(alpha, r);
            let at = |what: String| format!("α={alpha} r={r} {what}");
            // first-order change of pmf(k) in λ: (E[X(X−1)] − k(k−1))/2
            let factorial_moment = c.variance() + c.mean() * c.mean() - c.mean();
            for k in covered_support(&d) {
                let dev = relative_deviation(d.pmf(k), c.pmf(k));
                if dev > pmf_worst.value {
                    let kk = k as f64;
                    predicted = LAMBDA * (factorial_moment - kk * (kk - 1.0)).abs() / 2.0;
                }
                pmf_worst.update(dev, || at(format!("pmf({k})")));
                worst.update(relative_deviation(d.cdf(k as f64), c.cdf(k as f64)), || {
                    at(format!("cdf({k})"))
                });
            }
            worst.update(relative_deviation(d.normalizer(), c.normalizer), || {
                at("normalizer".into())
            });
            worst.update(relative_deviation(d.mean(), c.mean()), || at("mean".into()));
            worst.update(relative_deviation(d.variance(), c.variance()), || {
                at("variance".into())
            });
            for n in 0..=6 {
                let dev = relative_deviation(d.moment(n, SERIES_TOL).unwrap(), c.moment(n));
                worst.update(dev, || at(format!("E[X^{n}]")));
            }
            for t in [0.5, 1.0] {
                let dev = relative_deviation(d.pgf(t).unwrap(), c.pgf(t));
                worst.update(dev, || at(format!("pgf({t})")));
            }
        }
    }
    let passed = worst.value <= 1e-8 && pmf_worst.value <= 1e-8;
    outcome(
        passed,
        format!(
            "pmf {:.2e} at {} (first-order λ term predicts {predicted:.2e}), other quantities {:.2e} at {}",
            pmf_worst.value, pmf_worst.at, worst.value, worst.at
        ),
    )
}

fn worked_example() -> TruncatedDegenPoisson {
    TruncatedDegenPoisson::new(DistributionParams::new(lambda(1, 3), 3.0, 0).unwrap()).unwrap()
}

fn goodness_of_fit() -> Outcome {
    const DRAWS: usize = 1_000_000;
    const WORKERS: u64 = 4;
    let ((counts, mean, chi2, critical), elapsed) = timed(|| {
        let dist = worked_example();
        let per_worker = DRAWS / WORKERS as usize;
        let batches: Vec<Vec<u64>> = thread::scope(|s| {
            let handles: Vec<_> = (0..WORKERS)
                .map(|w| {
                    let dist = dist.clone();
                    s.spawn(move || {
                        SamplerState::new(dist, 20_240_611)
                            .with_stream(w)
                            .draw_batch(per_worker)
                            .values
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut counts = [0u64; 3];
        let mut sum = 0u64;
        for &x in batches.iter().flatten() {
            counts[(x - 1) as usize] += 1;
            sum += x;
        }
        let n = DRAWS as f64;
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let e = n * dist.pmf(i as u64 + 1);
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let critical = ChiSquared::new(2.0).unwrap().inverse_cdf(0.999);
        (counts, sum as f64 / n, chi2, critical)
    });
    let mean_bound = 4.0 * (24.0f64 / 49.0).sqrt() / 1000.0;
    let mean_error = (mean - 12.0 / 7.0).abs();
    let passed = chi2 < critical && mean_error <= mean_bound && elapsed < Duration::from_secs(30);
    outcome(
        passed,
        format!(
            "counts {counts:?}, χ² = {chi2:.3} (critical {critical:.3}), |mean − 12/7| = {mean_error:.2e} \
             (bound {mean_bound:.2e}), {elapsed:.2?}"
        ),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let batch = SamplerState::new(worked_example(), 42).draw_batch(10_000);
        serde_json::to_vec(&batch).unwrap()
    };
    let first = run();
    let second = run();
    outcome(
        first == second,
        format!(
            "two runs of 10000 draws, {} bytes each, identical: {}",
            first.len(),
            first == second
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("normalization", normalization),
        ("mean and variance closed forms", mean_variance),
        ("moments n ≤ 6", moments),
        ("cdf vs cumulative pmf", cdf),
        ("sum distribution vs convolution", sum_distribution),
        ("Stirling double vs exact", stirling),
        ("classical limit at λ = 1e-9", classical_limit),
        ("sampler goodness of fit", goodness_of_fit),
        ("sampler determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.passed {
            failures += 1;
        }
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{name}]: {verdict} ({})",
            i + 1,
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
