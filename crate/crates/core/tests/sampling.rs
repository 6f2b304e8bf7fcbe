use degenerate_poisson::{
    DegenerateLambda, DistributionParams, SamplerState, TruncatedDegenPoisson,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DRAWS: usize = 1_000_000;

fn grid() -> Vec<TruncatedDegenPoisson> {
    let mut out = Vec::new();
    for l in [0.0, -0.2, 1.0 / 3.0, 0.2] {
        for alpha in [0.5, 1.0, 3.0] {
            for r in [0, 1, 2, 5] {
                let params =
                    DistributionParams::new(DegenerateLambda::new(l).unwrap(), alpha, r).unwrap();
                if let Ok(d) = TruncatedDegenPoisson::new(params) {
                    out.push(d);
                }
            }
        }
    }
    out
}

/// Chi-square statistic and degrees of freedom, pooling from the right until
/// every bin expects at least five draws.
fn chi_square(dist: &TruncatedDegenPoisson, values: &[u64]) -> (f64, usize) {
    let n = values.len() as f64;
    let first = dist.support_min();
    let top = *values.iter().max().unwrap();
    let mut observed = vec![0u64; (top - first + 1) as usize];
    for &v in values {
        observed[(v - first) as usize] += 1;
    }
    let mut bins = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    let mut covered = 0.0;
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
    // fold the remainder and the unobserved tail into the last bin
    let tail = n * (1.0 - covered).max(0.0);
    if let Some(last) = bins.last_mut() {
        last.0 += o_acc;
        last.1 += e_acc + tail;
    }
    let stat = bins.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    (stat, bins.len() - 1)
}

#[test]
fn draws_fit_the_pmf_and_moments() {
    for (i, dist) in grid().into_iter().enumerate() {
        let batch = SamplerState::new(dist.clone(), 7_000 + i as u64).draw_batch(DRAWS);
        let (stat, df) = chi_square(&dist, &batch.values);
        if df > 0 {
            let critical = ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999);
            assert!(
                stat < critical,
                "{:?}: χ² {stat} ≥ {critical}",
                dist.params()
            );
        }
        let n = DRAWS as f64;
        let var = dist.variance();
        let mean_se = (var / n).sqrt();
        assert!((batch.mean().unwrap() - dist.mean()).abs() <= 4.0 * mean_se + 1e-12);
        // standard error of the sample variance from the fourth central moment
        let m = dist.mean();
        let mu4: f64 = dist
            .masses()
            .take_while(|&(_, p)| p >= f64::MIN_POSITIVE)
            .map(|(k, p)| (k as f64 - m).powi(4) * p)
            .sum();
        let var_se = ((mu4 - var * var) / n).max(0.0).sqrt();
        assert!(
            (batch.variance().unwrap() - var).abs() <= 4.0 * var_se + 1e-12,
            "{:?}",
            dist.params()
        );
    }
}

#[test]
fn equal_seeds_give_equal_batches() {
    let dist = grid().remove(5);
    let a = SamplerState::new(dist.clone(), 0xdead_beef).draw_batch(5_000);
    let b = SamplerState::new(dist.clone(), 0xdead_beef).draw_batch(5_000);
    assert_eq!(a, b);
    let c = SamplerState::new(dist, 0xdead_beef)
        .with_stream(1)
        .draw_batch(5_000);
    assert_ne!(a.values, c.values);
}
