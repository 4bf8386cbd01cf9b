//! Monte Carlo summaries and two-sample comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl McEstimate {
    /// Whether `target` lies within `k` standard errors plus `allowance`.
    pub fn agrees_with(&self, target: f64, k: f64, allowance: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + allowance
    }
}

/// Pairwise sum; error grows like `log n` rather than `n`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn mc_estimate(values: &[f64]) -> Result<McEstimate> {
    let n = values.len();
    ensure(n >= 2, || {
        Error::InsufficientData(format!("need at least 2 values, got {n}"))
    })?;
    ensure(values.iter().all(|v| v.is_finite()), || {
        Error::Numerical("non-finite value in Monte Carlo sample".into())
    })?;
    let mean = pairwise_sum(values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    let stderr = (var / n as f64).sqrt();
    Ok(McEstimate {
        n,
        mean,
        stderr,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
    })
}

/// Kolmogorov survival function `P(K > x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // the alternating series converges slowly here and the value is 1 to
        // double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value, using the
/// small-sample correction `(sqrt(m) + 0.12 + 0.11 / sqrt(m)) D`,
/// `m = n1 n2 / (n1 + n2)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    ensure(a.len() >= 50 && b.len() >= 50, || {
        Error::InsufficientData(format!(
            "KS test needs at least 50 values per sample, got {} and {}",
            a.len(),
            b.len()
        ))
    })?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ensure(a.iter().chain(&b).all(|v| !v.is_nan()), || {
        Error::Numerical("NaN in KS sample".into())
    })?;
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let m = (na * nb / (na + nb)).sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf((m + 0.12 + 0.11 / m) * d),
    })
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure(x.len() == y.len() && x.len() >= 2, || {
        Error::InsufficientData("correlation needs two equal samples of size >= 2".into())
    })?;
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let syy: Vec<f64> = y.iter().map(|b| (b - my) * (b - my)).collect();
    let den = (pairwise_sum(&sxx) * pairwise_sum(&syy)).sqrt();
    ensure(den > 0.0, || Error::Degenerate("constant sample in correlation".into()))?;
    Ok(pairwise_sum(&sxy) / den)
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        // ties share their average rank
        let avg = 0.5 * (i + j) as f64;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; insensitive to heavy tails.
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    ensure(x.len() == y.len(), || {
        Error::InsufficientData("rank correlation needs equal sample sizes".into())
    })?;
    correlation(&ranks(x), &ranks(y))
}

/// Welch z-score of the difference of two estimates.
pub fn z_difference(a: &McEstimate, b: &McEstimate) -> f64 {
    let se = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
    if se == 0.0 {
        if a.mean == b.mean {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a.mean - b.mean).abs() / se
    }
}
