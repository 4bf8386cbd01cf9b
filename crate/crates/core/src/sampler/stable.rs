use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

use crate::error::{ensure, Error, Result};

/// Positive `a`-stable law with `E[exp(-lambda X)] = exp(-lambda^a)`.
///
/// Sampled with Kanter's representation
/// `X = (A(U) / E)^{(1-a)/a}`, where `U` is uniform on `(0, 1)`, `E` is
/// standard exponential and
/// `A(u) = sin(a pi u)^{a/(1-a)} sin((1-a) pi u) / sin(pi u)^{1/(1-a)}`.
/// For `a = 1/2` the law is that of `1 / (2 N^2)` with `N` standard normal,
/// which is used directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveStable {
    a: f64,
}

impl PositiveStable {
    pub fn new(a: f64) -> Result<Self> {
        ensure(a > 0.0 && a < 1.0, || {
            Error::Domain(format!("stability index must lie in (0, 1), got {a}"))
        })?;
        Ok(Self { a })
    }

    pub fn index(&self) -> f64 {
        self.a
    }
}

impl Distribution<f64> for PositiveStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = self.a;
        if a == 0.5 {
            let z: f64 = rng.sample(StandardNormal);
            return 0.5 / (z * z);
        }
        let u: f64 = rng.sample(Open01);
        let e: f64 = rng.sample(Exp1);
        let b = 1.0 - a;
        let ln_a = (a / b) * (a * PI * u).sin().ln() + (b * PI * u).sin().ln()
            - (PI * u).sin().ln() / b;
        ((b / a) * (ln_a - e.ln())).exp()
    }
}

pub fn sample_positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<f64> {
    Ok(PositiveStable::new(a)?.sample(rng))
}
