//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerics.
#![allow(dead_code)]

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square statistic of `observed` against `probs`, and whether
/// it stays below the `1 - alpha` quantile.
pub fn chi_square(observed: &[u64], probs: &[f64], alpha: f64) -> (f64, f64, bool) {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n as f64 * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let crit = ChiSquared::new(df).unwrap().inverse_cdf(1.0 - alpha);
    (stat, crit, stat <= crit)
}

/// Inverse-CDF sampler for `P(k) = k^-gamma / Z` on `k >= k_min`: an exact
/// table up to `TABLE` and a continuous Pareto approximation beyond it.
pub struct PowerLawSampler {
    k_min: u64,
    cdf: Vec<f64>,
    gamma: f64,
}

const TABLE: u64 = 1_000_000;

impl PowerLawSampler {
    pub fn new(gamma: f64, k_min: u64) -> Self {
        let weights: Vec<f64> = (k_min..=TABLE).map(|k| (k as f64).powf(-gamma)).collect();
        // Euler-Maclaurin leading terms for the sum beyond the table.
        let x = TABLE as f64 + 1.0;
        let tail = x.powf(1.0 - gamma) / (gamma - 1.0) + 0.5 * x.powf(-gamma);
        // Sum small terms first.
        let head: f64 = weights.iter().rev().sum();
        let z = head + tail;
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / z;
                acc
            })
            .collect();
        PowerLawSampler { k_min, cdf, gamma }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c < u);
        if i < self.cdf.len() {
            return self.k_min + i as u64;
        }
        let last = *self.cdf.last().unwrap();
        let v = ((u - last) / (1.0 - last)).min(1.0 - 1e-16);
        let x = (TABLE as f64 + 0.5) * (1.0 - v).powf(-1.0 / (self.gamma - 1.0));
        x.round() as u64
    }
}
