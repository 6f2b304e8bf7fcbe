//! Reproducible random variates by inverse-transform sequential search.
//!
//! The uniform source is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Each draw consumes one `u64`, whose top 53 bits
//! give `u = (x >> 11) · 2⁻⁵³ ∈ [0, 1)`. Both steps are platform independent,
//! so a `(params, seed, stream)` triple replays bit for bit.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::TruncatedDegenPoisson;

/// Name of the uniform generator, recorded alongside every batch.
pub const GENERATOR: &str = "chacha20";

/// A distribution plus a seeded generator. One owner, one stream of draws.
#[derive(Debug, Clone)]
pub struct SamplerState {
    dist: TruncatedDegenPoisson,
    seed: u64,
    rng: ChaCha20Rng,
    first: u64,
    first_mass: f64,
}

impl SamplerState {
    pub fn new(dist: TruncatedDegenPoisson, seed: u64) -> Self {
        let first = dist.support_min();
        let first_mass = dist.pmf(first);
        SamplerState {
            dist,
            seed,
            rng: ChaCha20Rng::seed_from_u64(seed),
            first,
            first_mass,
        }
    }

    /// Switches to an independent ChaCha stream, for one-state-per-worker use.
    pub fn with_stream(mut self, stream: u64) -> Self {
        self.rng.set_stream(stream);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist(&self) -> &TruncatedDegenPoisson {
        &self.dist
    }

    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn draw(&mut self) -> u64 {
        let u = self.next_uniform();
        self.invert(u)
    }

    /// Smallest support point `k` with `P(X ≤ k) ≥ u`.
    ///
    /// Masses are accumulated with `p(k+1) = p(k)·α(1 − kλ)/(k + 1)`. Rounding
    /// deficit in the cumulative sum goes to the last point reached: `m` for
    /// finite support, otherwise the point where further masses no longer
    /// change the sum.
    pub fn invert(&self, u: f64) -> u64 {
        let max = self.dist.support_max();
        let mut k = self.first;
        let mut p = self.first_mass;
        let mut cum = p;
        while cum < u {
            if max == Some(k) {
                break;
            }
            let ratio = self.dist.mass_ratio(k);
            p *= ratio;
            k += 1;
            if cum + p == cum && ratio < 1.0 {
                break;
            }
            cum += p;
        }
        k
    }

    pub fn draw_batch(&mut self, count: usize) -> SampleBatch {
        let values = (0..count).map(|_| self.draw()).collect();
        SampleBatch {
            values,
            seed: self.seed,
            count,
        }
    }
}

/// Drawn variates with what is needed to replay them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<u64>,
    pub seed: u64,
    pub count: usize,
}

impl SampleBatch {
    pub fn mean(&self) -> Option<f64> {
        if self.values.is_empty() {
            return None;
        }
        Some(self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len() as f64)
    }

    /// Unbiased sample variance; `None` below two values.
    pub fn variance(&self) -> Option<f64> {
        if self.values.len() < 2 {
            return None;
        }
        let mean = self.mean()?;
        let ss: f64 = self.values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
        Some(ss / (self.values.len() - 1) as f64)
    }
}
