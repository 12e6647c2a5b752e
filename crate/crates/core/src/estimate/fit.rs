use serde::Serialize;

use super::zeta::hurwitz_zeta;
use super::{DegreeHistogram, EstimateError, Result};

/// Fewest tail samples for which a fit is reported.
pub const MIN_TAIL: u64 = 10;

/// Search interval for the exponent.
const GAMMA_LO: f64 = 1.0 + 1e-6;
const GAMMA_HI: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitMethod {
    DiscreteMLE,
    CCDFRegression,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub gamma_hat: f64,
    pub k_min: u64,
    pub n_tail: u64,
    pub stderr: f64,
    pub method: FitMethod,
    /// Kolmogorov-Smirnov distance between the tail and the fitted law
    /// (MLE only).
    pub ks: Option<f64>,
}

impl PowerLawFit {
    /// Fitted probability of degree `k >= k_min`: `k^-gamma / zeta(gamma, k_min)`.
    pub fn pmf(&self, k: u64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        (k as f64).powf(-self.gamma_hat) / hurwitz_zeta(self.gamma_hat, self.k_min as f64)
    }
}

/// Tail of a histogram as parallel `(degree, count)` slices.
struct Tail {
    k: Vec<u64>,
    m: Vec<u64>,
    n: u64,
    sum_ln: f64,
}

impl Tail {
    fn new(hist: &DegreeHistogram, k_min: u64) -> Tail {
        let (mut k, mut m) = (Vec::new(), Vec::new());
        let (mut n, mut sum_ln) = (0, 0.0);
        for (&deg, &cnt) in hist.counts.range(k_min.max(1)..) {
            if cnt == 0 {
                continue;
            }
            k.push(deg);
            m.push(cnt);
            n += cnt;
            sum_ln += cnt as f64 * (deg as f64).ln();
        }
        Tail { k, m, n, sum_ln }
    }

    fn check(&self) -> Result<()> {
        if self.n < MIN_TAIL {
            return Err(EstimateError::InsufficientTail { n_tail: self.n });
        }
        if self.k.len() < 2 {
            return Err(EstimateError::DegenerateSupport);
        }
        Ok(())
    }
}

/// Maximizes the concave log-likelihood `-n ln zeta(g, k_min) - g sum ln k`
/// by golden-section search.
fn mle(tail: &Tail, k_min: u64) -> f64 {
    let a = k_min as f64;
    let n = tail.n as f64;
    let nll = |g: f64| n * hurwitz_zeta(g, a).ln() + g * tail.sum_ln;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (GAMMA_LO, GAMMA_HI);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (nll(x1), nll(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = nll(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = nll(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Sup distance between the empirical tail CDF and the fitted CDF, checked
/// at every observed degree and just before the next one.
fn ks_distance(tail: &Tail, k_min: u64, gamma: f64) -> f64 {
    let z0 = hurwitz_zeta(gamma, k_min as f64);
    let model_cdf = |k: u64| 1.0 - hurwitz_zeta(gamma, (k + 1) as f64) / z0;
    let n = tail.n as f64;
    let mut below = 0u64;
    let mut d: f64 = 0.0;
    for i in 0..tail.k.len() {
        // Just before this degree the empirical CDF still equals below/n.
        let prev = tail.k[i] - 1;
        if prev >= k_min && (i == 0 || prev > tail.k[i - 1]) {
            d = d.max((model_cdf(prev) - below as f64 / n).abs());
        }
        below += tail.m[i];
        d = d.max((model_cdf(tail.k[i]) - below as f64 / n).abs());
    }
    d
}

fn fit_mle_at(hist: &DegreeHistogram, k_min: u64) -> Result<PowerLawFit> {
    let tail = Tail::new(hist, k_min);
    tail.check()?;
    let gamma = mle(&tail, k_min);
    Ok(PowerLawFit {
        gamma_hat: gamma,
        k_min,
        n_tail: tail.n,
        stderr: (gamma - 1.0) / (tail.n as f64).sqrt(),
        method: FitMethod::DiscreteMLE,
        ks: Some(ks_distance(&tail, k_min, gamma)),
    })
}

/// Discrete power-law fit over degrees `>= k_min`. Without `k_min`, every
/// observed positive degree leaving at least [`MIN_TAIL`] samples is tried
/// and the one minimizing the KS distance is kept.
pub fn fit_power_law(hist: &DegreeHistogram, k_min: Option<u64>) -> Result<PowerLawFit> {
    if let Some(k) = k_min {
        return fit_mle_at(hist, k.max(1));
    }
    let mut best: Option<PowerLawFit> = None;
    let mut first_err = None;
    for &k in hist.counts.range(1..).filter(|(_, c)| **c > 0).map(|(k, _)| k) {
        match fit_mle_at(hist, k) {
            Ok(f) => {
                if best.is_none_or(|b| f.ks < b.ks) {
                    best = Some(f);
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
                // Tails only shrink from here.
                if matches!(e, EstimateError::InsufficientTail { .. }) {
                    break;
                }
            }
        }
    }
    best.ok_or(first_err.unwrap_or(EstimateError::InsufficientTail { n_tail: 0 }))
}

/// Least squares of `ln P(X >= k)` on `ln k` over the tail `k >= k_min`
/// (default 1); the slope is `1 - gamma`.
pub fn fit_ccdf_regression(hist: &DegreeHistogram, k_min: Option<u64>) -> Result<PowerLawFit> {
    let k_min = k_min.unwrap_or(1).max(1);
    let tail = Tail::new(hist, k_min);
    tail.check()?;
    let n = tail.n as f64;
    let mut above = tail.n;
    let mut pts = Vec::with_capacity(tail.k.len());
    for (&k, &m) in tail.k.iter().zip(&tail.m) {
        pts.push(((k as f64).ln(), (above as f64 / n).ln()));
        above -= m;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if pts.len() > 2 {
        let rss: f64 = pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (rss / (len - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(PowerLawFit {
        gamma_hat: 1.0 - slope,
        k_min,
        n_tail: tail.n,
        stderr,
        method: FitMethod::CCDFRegression,
        ks: None,
    })
}
