//! Critical offspring distributions.

use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{check_gamma, ensure, Error, Result};
use crate::oracles::special::{hurwitz_zeta, zeta};

/// Number of explicitly tabulated probabilities for unbounded laws.
const TABLE_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    /// No mass at or beyond the table end.
    Empty,
    /// `P(xi = k)` proportional to `ratio^k` beyond the table.
    Geometric { ratio: f64 },
    /// `P(xi = k)` proportional to `k^{-1-exponent}` beyond the table.
    Power { exponent: f64 },
}

/// A critical offspring law on the nonnegative integers.
///
/// Stored as a probability table `pmf[k]` for `k < K` plus exact survival
/// values `sf[k] = P(xi >= k)` for `k <= K`, and a closed-form tail beyond `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    name: String,
    gamma: f64,
    pmf: Vec<f64>,
    sf: Vec<f64>,
    tail: Tail,
    variance: Option<f64>,
}

impl OffspringLaw {
    /// `P(xi = k) = 2^{-k-1}`: mean 1, variance 2, in the Brownian domain.
    pub fn geometric_half() -> Self {
        let pmf: Vec<f64> = (0..64).map(|k| 0.5f64.powi(k + 1)).collect();
        let sf: Vec<f64> = (0..=64).map(|k| 0.5f64.powi(k)).collect();
        Self {
            name: "geometric".into(),
            gamma: 2.0,
            pmf,
            sf,
            tail: Tail::Geometric { ratio: 0.5 },
            variance: Some(2.0),
        }
    }

    /// `P(xi = 0) = P(xi = 2) = 1/2`: mean 1, variance 1.
    pub fn binary() -> Self {
        Self {
            name: "binary".into(),
            gamma: 2.0,
            pmf: vec![0.5, 0.0, 0.5],
            sf: vec![1.0, 0.5, 0.5, 0.0],
            tail: Tail::Empty,
            variance: Some(1.0),
        }
    }

    /// `P(xi = k) = k^{-1-gamma} / zeta(gamma)` for `k >= 1`, with `P(xi = 0)`
    /// taking the rest. The mean is exactly 1 and the tail index `gamma`
    /// places the law in the domain of attraction of a `gamma`-stable law.
    pub fn zipf(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        ensure(gamma < 2.0, || {
            Error::Domain("zipf law needs gamma < 2 (use geometric for gamma = 2)".into())
        })?;
        let c = 1.0 / zeta(gamma)?;
        let mut pmf = vec![0.0; TABLE_LEN];
        for (k, p) in pmf.iter_mut().enumerate().skip(1) {
            *p = c * (k as f64).powf(-1.0 - gamma);
        }
        let mut sf = vec![0.0; TABLE_LEN + 1];
        sf[TABLE_LEN] = c * hurwitz_zeta(1.0 + gamma, TABLE_LEN as f64)?;
        for k in (1..TABLE_LEN).rev() {
            sf[k] = sf[k + 1] + pmf[k];
        }
        pmf[0] = 1.0 - sf[1];
        sf[0] = 1.0;
        Ok(Self {
            name: "zipf".into(),
            gamma,
            pmf,
            sf,
            tail: Tail::Power { exponent: gamma },
            variance: None,
        })
    }

    /// Default law for a stability index: geometric for 2, zipf below.
    pub fn default_for(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if gamma == 2.0 {
            Ok(Self::geometric_half())
        } else {
            Self::zipf(gamma)
        }
    }

    pub fn by_name(name: &str, gamma: f64) -> Result<Self> {
        let law = match name {
            "geometric" => Self::geometric_half(),
            "binary" => Self::binary(),
            "zipf" => Self::zipf(gamma)?,
            "default" => Self::default_for(gamma)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown offspring law {other}; expected geometric, binary, zipf or default"
                )))
            }
        };
        ensure(law.gamma == gamma, || {
            Error::Config(format!("law {} is in the domain of gamma = {}, not {gamma}", law.name, law.gamma))
        })?;
        Ok(law)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn variance(&self) -> Option<f64> {
        self.variance
    }

    /// Distance scale making unit-edge trees of finite-variance laws
    /// converge to the tree coded by `sqrt(2)` times a Brownian excursion:
    /// `sigma / sqrt(2)`. `None` for infinite-variance laws.
    pub fn brownian_kappa(&self) -> Option<f64> {
        self.variance.map(|v| (v / 2.0).sqrt())
    }

    pub fn table_len(&self) -> usize {
        self.pmf.len()
    }

    pub fn pmf(&self, k: usize) -> f64 {
        if k < self.pmf.len() {
            return self.pmf[k];
        }
        let big_k = self.pmf.len();
        match self.tail {
            Tail::Empty => 0.0,
            Tail::Geometric { ratio } => self.sf[big_k] * (1.0 - ratio) * ratio.powi((k - big_k) as i32),
            Tail::Power { exponent } => {
                let c = self.pmf[1];
                c * (k as f64).powf(-1.0 - exponent)
            }
        }
    }

    /// `P(xi >= k)`.
    pub fn survival(&self, k: usize) -> f64 {
        if k < self.sf.len() {
            return self.sf[k];
        }
        match self.tail {
            Tail::Empty => 0.0,
            Tail::Geometric { ratio } => {
                let big_k = self.pmf.len();
                self.sf[big_k] * ratio.powi((k - big_k) as i32)
            }
            Tail::Power { exponent } => {
                self.pmf[1] * hurwitz_zeta(1.0 + exponent, k as f64).unwrap_or(0.0)
            }
        }
    }

    /// `P(xi = k | xi >= k)`.
    pub(crate) fn hazard(&self, k: usize) -> f64 {
        let s = self.survival(k);
        if s <= 0.0 {
            return 1.0;
        }
        (self.pmf(k) / s).clamp(0.0, 1.0)
    }

    /// Total probability, computed from the table and the tail.
    pub fn total(&self) -> f64 {
        self.pmf.iter().sum::<f64>() + self.sf[self.pmf.len()]
    }

    /// Mean, `sum_{k >= 1} P(xi >= k)`, with the tail summed in closed form.
    pub fn mean(&self) -> f64 {
        let big_k = self.pmf.len();
        let head: f64 = self.sf[1..big_k].iter().sum();
        let tail = match self.tail {
            Tail::Empty => 0.0,
            Tail::Geometric { ratio } => self.sf[big_k] / (1.0 - ratio),
            Tail::Power { exponent } => {
                // sum_{k >= K} P(xi >= k) = sum_{j >= K} (j - K + 1) p_j
                let c = self.pmf[1];
                let first = c * hurwitz_zeta(exponent, big_k as f64).unwrap_or(f64::NAN);
                first - (big_k as f64 - 1.0) * self.sf[big_k]
            }
        };
        head + tail
    }

    /// Draw `xi` conditioned on `xi >= k`.
    pub fn sample_at_least<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> usize {
        let big_k = self.pmf.len();
        if k >= big_k {
            return self.sample_tail(k, rng);
        }
        let top = self.sf[k];
        let u: f64 = rng.sample::<f64, _>(Open01) * top;
        if u < self.sf[big_k] {
            return self.sample_tail(big_k, rng);
        }
        // largest j in [k, K) with sf[j] > u; then sf[j + 1] <= u
        let (mut lo, mut hi) = (k, big_k);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.sf[mid] > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn sample_tail<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> usize {
        match self.tail {
            Tail::Empty => k,
            Tail::Geometric { ratio } => {
                let u: f64 = rng.sample(Open01);
                k + (u.ln() / ratio.ln()).floor() as usize
            }
            Tail::Power { exponent } => {
                // propose floor(Y) with Y Pareto on [k, inf) of index `exponent`;
                // accept with the ratio of target to proposal mass, which is
                // at most ((k + 1) / k)^{1 + exponent}
                let kf = k.max(1) as f64;
                let bound = ((kf + 1.0) / kf).powf(1.0 + exponent);
                loop {
                    let u: f64 = rng.sample(Open01);
                    let y = kf * u.powf(-1.0 / exponent);
                    if y >= 1e15 {
                        return usize::MAX / 4;
                    }
                    let j = y.floor();
                    let proposal = (j.powf(-exponent) - (j + 1.0).powf(-exponent)) / exponent;
                    let target = j.powf(-1.0 - exponent);
                    let v: f64 = rng.sample(Open01);
                    if v * bound * proposal <= target {
                        return j as usize;
                    }
                }
            }
        }
    }
}

impl Distribution<usize> for OffspringLaw {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_at_least(0, rng)
    }
}
