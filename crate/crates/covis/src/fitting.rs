//! Distribution fitting for degree samples and scatter relations.
//!
//! Degree distributions are compared by maximum likelihood between a discrete
//! exponential (geometric) and a discrete power law (zeta), both with
//! `xmin = 1`; the signed log-likelihood ratio is positive when the
//! exponential explains the data better. Scatter relations of the form
//! `y = a * x^b` are fitted by least squares on log-log pairs.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which family a comparison favored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Exponential,
    PowerLaw,
}

/// Degree-distribution fit: both family fits plus their comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Family favored by the log-likelihood ratio.
    pub family: FitFamily,
    /// Decay rate of the exponential fit, `P(k) ~ exp(-lambda * k)`.
    pub lambda: f64,
    /// Exponent of the power-law fit, `P(k) ~ k^-alpha`.
    pub alpha: f64,
    /// Lower cutoff shared by both fits.
    pub xmin: u64,
    pub loglik_exponential: f64,
    pub loglik_power_law: f64,
    /// `loglik_exponential - loglik_power_law`; positive favors exponential.
    pub llr: f64,
}

const MIN_SAMPLES: usize = 10;

/// Fit both families to a positive-degree sample (zeros are ignored) and
/// report the signed log-likelihood ratio.
pub fn fit_degree_distribution(degrees: &[u64]) -> Result<FitResult> {
    let sample: Vec<u64> = degrees.iter().copied().filter(|&d| d > 0).collect();
    if sample.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            what: "positive degrees",
            need: MIN_SAMPLES,
            got: sample.len(),
        });
    }
    let first = sample[0];
    if sample.iter().all(|&d| d == first) {
        return Err(Error::DegenerateSample {
            n: sample.len(),
            value: first,
        });
    }

    let n = sample.len() as f64;
    let mean = sample.iter().map(|&d| d as f64).sum::<f64>() / n;
    let sum_ln: f64 = sample.iter().map(|&d| (d as f64).ln()).sum();

    // Geometric on k = 1, 2, ...: P(k) = (1 - q) q^(k-1), MLE q = (mean-1)/mean.
    let q = (mean - 1.0) / mean;
    let lambda = -q.ln();
    let loglik_exponential = n * (1.0 - q).ln() + (mean - 1.0) * n * q.ln();

    // Zeta on k >= 1: P(k) = k^-alpha / zeta(alpha); concave log-likelihood,
    // maximized by golden-section search.
    let zeta_loglik = |alpha: f64| -n * zeta(alpha).ln() - alpha * sum_ln;
    let alpha = golden_max(zeta_loglik, 1.000_001, 60.0);
    let loglik_power_law = zeta_loglik(alpha);

    let llr = loglik_exponential - loglik_power_law;
    Ok(FitResult {
        family: if llr >= 0.0 {
            FitFamily::Exponential
        } else {
            FitFamily::PowerLaw
        },
        lambda,
        alpha,
        xmin: 1,
        loglik_exponential,
        loglik_power_law,
        llr,
    })
}

/// Riemann zeta for s > 1 via truncated sum plus Euler-Maclaurin tail.
fn zeta(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    const N: u64 = 100;
    let mut sum = 0.0;
    for k in 1..N {
        sum += (k as f64).powf(-s);
    }
    let nf = N as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * nf.powf(-s);
    sum += s / 12.0 * nf.powf(-s - 1.0);
    sum
}

/// Golden-section maximization of a unimodal function on [lo, hi].
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Least-squares power-law fit `y = a * x^b` on log-log pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// Coefficient of determination on the (ln x, ln y) points.
    pub r2: f64,
}

/// Fit over the strictly positive pairs of `points`; fewer than 3 such
/// pairs is an error.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::TooFewSamples {
            what: "positive (x, y) pairs",
            need: 3,
            got: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSample {
            n: logs.len(),
            value: 0,
        });
    }
    let b = sxy / sxx;
    let intercept = mean_y - b * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + b * p.0)).powi(2))
        .sum();
    // All-equal y is reproduced exactly by the constant fit.
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(PowerLawFit {
        a: intercept.exp(),
        b,
        r2,
    })
}

/// Inverse-CDF sampler for the geometric distribution on k >= 1 with
/// `P(k) = (1 - e^-lambda) e^(-lambda (k-1))`. Test scaffolding for fit
/// recovery checks.
pub fn sample_geometric<R: rand::Rng>(rng: &mut R, lambda: f64, n: usize) -> Vec<u64> {
    let q = (-lambda).exp();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            ((1.0 - u).ln() / q.ln()).floor() as u64 + 1
        })
        .collect()
}

/// Table-based sampler for the zeta distribution on 1 <= k <= cutoff with
/// `P(k) ~ k^-alpha`; the tail mass beyond the cutoff folds into the last
/// bin. Test scaffolding for fit recovery checks.
pub fn sample_power_law<R: rand::Rng>(rng: &mut R, alpha: f64, cutoff: u64, n: usize) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(cutoff as usize);
    let mut acc = 0.0;
    for k in 1..=cutoff {
        acc += (k as f64).powf(-alpha);
        cdf.push(acc);
    }
    let total = acc;
    (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c < u);
            idx.min(cutoff as usize - 1) as u64 + 1
        })
        .collect()
}
