//! The stable subordinator with Laplace exponent `phi(lambda) = gamma lambda^{1-1/gamma}`
//! and its exponential functional `int_0^inf exp(-S_t - c t / H) dt`.
//!
//! Paths are sampled exactly at grid times: an increment over a step of
//! length `delta` is `(gamma delta)^{1/a} X` with `a = 1 - 1/gamma` and `X`
//! standard positive `a`-stable. Since `t -> exp(-S_t)` is nonincreasing,
//! left and right Riemann sums bracket the integral on every cell. Beyond the
//! horizon `T` the remaining integral has conditional mean
//! `exp(-S_T - c T / H) / (gamma + c / H)`.

use rand::Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::error::{check_gamma, ensure, Error, Result};
use crate::sampler::PositiveStable;

pub const DEFAULT_DELTA: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_STEPS: usize = 10_000_000;

/// `phi(lambda) = gamma lambda^{1 - 1/gamma}`.
pub fn laplace_exponent(gamma: f64, lambda: f64) -> f64 {
    gamma * lambda.powf(1.0 - 1.0 / gamma)
}

#[derive(Debug, Clone, Copy)]
struct Increments {
    scale: f64,
    stable: PositiveStable,
}

impl Increments {
    fn new(gamma: f64, dt: f64) -> Result<Self> {
        check_gamma(gamma)?;
        ensure(dt > 0.0 && dt.is_finite(), || {
            Error::Domain(format!("time step must be > 0, got {dt}"))
        })?;
        let a = 1.0 - 1.0 / gamma;
        Ok(Self {
            scale: (gamma * dt).powf(1.0 / a),
            stable: PositiveStable::new(a)?,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.stable.sample(rng)
    }
}

/// `S_t` for a single time `t`.
pub fn sample_at<R: Rng + ?Sized>(gamma: f64, t: f64, rng: &mut R) -> Result<f64> {
    Ok(Increments::new(gamma, t)?.sample(rng))
}

fn check_tol(tol: f64) -> Result<()> {
    ensure(tol > 0.0 && tol < 1.0, || {
        Error::Domain(format!("horizon tolerance must lie in (0, 1), got {tol}"))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatorPath {
    pub gamma: f64,
    pub delta: f64,
    /// `S` at times `0, delta, 2 delta, ...`.
    pub values: Vec<f64>,
}

impl SubordinatorPath {
    pub fn horizon(&self) -> f64 {
        self.delta * (self.values.len() - 1) as f64
    }

    /// Value at the last grid time not after `t` (the path beyond the horizon
    /// is reported as its final value).
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = ((t / self.delta).floor() as usize).min(self.values.len() - 1);
        self.values[k]
    }
}

/// Grid path of `S`, extended until `exp(-S_t) < tol * gamma`.
pub fn sample_path<R: Rng + ?Sized>(
    gamma: f64,
    delta: f64,
    tol: f64,
    rng: &mut R,
) -> Result<SubordinatorPath> {
    let inc = Increments::new(gamma, delta)?;
    check_tol(tol)?;
    let stop = -(tol * gamma).ln();
    let mut values = vec![0.0];
    let mut s = 0.0;
    while s <= stop {
        ensure(values.len() <= MAX_STEPS, || {
            Error::Runtime(format!("subordinator path not past its horizon after {MAX_STEPS} steps"))
        })?;
        s += inc.sample(rng);
        values.push(s);
    }
    Ok(SubordinatorPath { gamma, delta, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSample {
    pub lower: f64,
    pub upper: f64,
    pub estimate: f64,
    pub c: f64,
    pub h: f64,
    pub horizon: f64,
}

impl LimitSample {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Exponential functionals of one path for several `(c, H)` pairs at once.
pub fn limit_integrals<R: Rng + ?Sized>(
    gamma: f64,
    drifts: &[(f64, f64)],
    delta: f64,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<LimitSample>> {
    let inc = Increments::new(gamma, delta)?;
    check_tol(tol)?;
    let mut rates = Vec::with_capacity(drifts.len());
    for &(c, h) in drifts {
        ensure(c >= 0.0 && c.is_finite(), || Error::Domain(format!("c must be >= 0, got {c}")))?;
        ensure(c == 0.0 || (h > 0.0 && h.is_finite()), || {
            Error::Domain(format!("H must be positive and finite when c > 0, got {h}"))
        })?;
        rates.push(if c == 0.0 { 0.0 } else { c / h });
    }
    // per rate: weight of the current cell, its decay per step, running sums
    let mut cell: Vec<f64> = rates
        .iter()
        .map(|&r| if r == 0.0 { delta } else { -(-r * delta).exp_m1() / r })
        .collect();
    let decay: Vec<f64> = rates.iter().map(|&r| (-r * delta).exp()).collect();
    let mut lower = vec![0.0; rates.len()];
    let mut upper = vec![0.0; rates.len()];
    let stop = -(tol * gamma).ln();
    let mut s = 0.0;
    let mut e_prev = 1.0;
    let mut steps = 0usize;
    while s <= stop {
        ensure(steps < MAX_STEPS, || {
            Error::Runtime(format!("subordinator path not past its horizon after {MAX_STEPS} steps"))
        })?;
        s += inc.sample(rng);
        let e_next = (-s).exp();
        for i in 0..rates.len() {
            lower[i] += e_next * cell[i];
            upper[i] += e_prev * cell[i];
            cell[i] *= decay[i];
        }
        e_prev = e_next;
        steps += 1;
    }
    let horizon = steps as f64 * delta;
    Ok(drifts
        .iter()
        .zip(&rates)
        .enumerate()
        .map(|(i, (&(c, h), &r))| {
            let tail = e_prev * (-r * horizon).exp() / (gamma + r);
            LimitSample {
                lower: lower[i],
                upper: upper[i] + tail,
                estimate: 0.5 * (lower[i] + upper[i]) + tail,
                c,
                h,
                horizon,
            }
        })
        .collect())
}

/// `int_0^inf exp(-S_t - c t / H) dt` with its Riemann brackets.
pub fn limit_integral<R: Rng + ?Sized>(
    gamma: f64,
    c: f64,
    h: f64,
    delta: f64,
    tol: f64,
    rng: &mut R,
) -> Result<LimitSample> {
    Ok(limit_integrals(gamma, &[(c, h)], delta, tol, rng)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::subordinator_moment;
    use crate::rng::{map_replicates, RngStream};
    use crate::stats::{ks_two_sample, mc_estimate};

    #[test]
    fn argument_checks() {
        let mut rng = RngStream::new(0, 0).rng();
        assert!(matches!(sample_path(2.0, 0.0, 1e-6, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(sample_path(2.0, 1e-3, 1.0, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(limit_integral(2.0, 1.0, 0.0, 1e-3, 1e-6, &mut rng), Err(Error::Domain(_))));
        assert!(limit_integral(2.0, 0.0, f64::INFINITY, 1e-3, 1e-6, &mut rng).is_ok());
    }

    #[test]
    fn path_shape() {
        let mut rng = RngStream::new(1, 0).rng();
        let p = sample_path(1.5, 1e-2, 1e-6, &mut rng).unwrap();
        assert_eq!(p.values[0], 0.0);
        assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
        assert!((-p.values.last().unwrap()).exp() < 1e-6 * 1.5);
        assert_eq!(p.value_at(0.0), 0.0);
        assert_eq!(p.value_at(1e9), *p.values.last().unwrap());
    }

    #[test]
    fn laplace_transform_grid() {
        for gamma in [1.5, 2.0] {
            for (j, lambda) in [0.5, 1.0, 2.0].into_iter().enumerate() {
                for (k, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
                    let stream = RngStream::new(50 + j as u64, k as u64 + 10 * gamma as u64);
                    let vals = map_replicates(&stream.fork(7), 1, |_, rng| {
                        (0..100_000)
                            .map(|_| (-lambda * sample_at(gamma, t, rng).unwrap()).exp())
                            .collect::<Vec<_>>()
                    })
                    .remove(0);
                    let est = mc_estimate(&vals).unwrap();
                    let target = (-t * laplace_exponent(gamma, lambda)).exp();
                    assert!(est.agrees_with(target, 3.5, 0.0), "gamma={gamma} l={lambda} t={t}: {} vs {target}", est.mean);
                }
            }
        }
    }

    #[test]
    fn moments_of_s1() {
        let mut rng = RngStream::new(3, 0).rng();
        for (gamma, p) in [(2.0, 0.25), (2.0, -1.0), (1.5, 0.2)] {
            let vals: Vec<f64> = (0..200_000).map(|_| sample_at(gamma, 1.0, &mut rng).unwrap().powf(p)).collect();
            let est = mc_estimate(&vals).unwrap();
            let target = subordinator_moment(gamma, p).unwrap();
            assert!(est.agrees_with(target, 3.0, 0.0), "gamma={gamma} p={p}: {} vs {target}", est.mean);
        }
    }

    #[test]
    fn independent_increments() {
        let mut rng = RngStream::new(4, 0).rng();
        let one: Vec<f64> = (0..100_000).map(|_| sample_at(1.5, 0.2, &mut rng).unwrap()).collect();
        let two: Vec<f64> = (0..100_000)
            .map(|_| sample_at(1.5, 0.1, &mut rng).unwrap() + sample_at(1.5, 0.1, &mut rng).unwrap())
            .collect();
        assert!(ks_two_sample(&one, &two).unwrap().p_value > 0.001);
    }

    #[test]
    fn self_similarity() {
        let gamma = 1.5;
        let mut rng = RngStream::new(5, 0).rng();
        let base: Vec<f64> = (0..20_000).map(|_| sample_at(gamma, 1.0, &mut rng).unwrap()).collect();
        for c in [2.0f64, 4.0] {
            let f = c.powf(gamma / (gamma - 1.0));
            let scaled: Vec<f64> = (0..20_000).map(|_| sample_at(gamma, c, &mut rng).unwrap() / f).collect();
            assert!(ks_two_sample(&base, &scaled).unwrap().p_value > 0.001);
        }
    }

    #[test]
    fn brackets_and_means() {
        let stream = RngStream::new(6, 0);
        let drifts = [(0.0, 1.0), (1.0, 1.0), (0.5, 2.0)];
        let samples = map_replicates(&stream, 20_000, |_, rng| {
            limit_integrals(1.5, &drifts, 1e-3, 1e-6, rng).unwrap()
        });
        for (i, &(c, h)) in drifts.iter().enumerate() {
            let vals: Vec<f64> = samples.iter().map(|s| s[i].estimate).collect();
            assert!(samples.iter().all(|s| s[i].lower <= s[i].estimate && s[i].estimate <= s[i].upper));
            let est = mc_estimate(&vals).unwrap();
            let target = 1.0 / (1.5 + c / h);
            let width = samples.iter().map(|s| s[i].width()).fold(0.0, f64::max);
            assert!(est.agrees_with(target, 3.0, width), "c={c}: {} vs {target}", est.mean);
        }
    }

    #[test]
    fn bracket_width_is_linear_in_delta() {
        let widths: Vec<f64> = [2e-3, 1e-3]
            .iter()
            .map(|&d| {
                let w: Vec<f64> = map_replicates(&RngStream::new(8, 0), 2000, |_, rng| {
                    limit_integral(2.0, 0.0, 1.0, d, 1e-6, rng).unwrap().width()
                });
                w.iter().sum::<f64>() / w.len() as f64
            })
            .collect();
        let ratio = widths[0] / widths[1];
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
