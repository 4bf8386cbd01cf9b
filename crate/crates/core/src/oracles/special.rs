//! Gamma, Beta and zeta functions.
//!
//! Gamma and log-Gamma come from `statrs` (Lanczos, g = 10.9). Beta is
//! evaluated in log space. The Hurwitz zeta function is computed here by
//! Euler-Maclaurin summation.

use std::f64::consts::PI;

use crate::error::{ensure, Error, Result};

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

pub fn gamma(x: f64) -> Result<f64> {
    ensure(x.is_finite() && !is_pole(x), || {
        Error::Domain(format!("Gamma has a pole at {x}"))
    })?;
    Ok(statrs::function::gamma::gamma(x))
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    ensure(x.is_finite() && !is_pole(x), || {
        Error::Domain(format!("Gamma has a pole at {x}"))
    })?;
    if x > 0.0 {
        Ok(statrs::function::gamma::ln_gamma(x))
    } else {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        Ok(PI.ln() - (PI * x).sin().abs().ln() - statrs::function::gamma::ln_gamma(1.0 - x))
    }
}

pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    ensure(a > 0.0 && b > 0.0, || {
        Error::Domain(format!("Beta needs positive arguments, got ({a}, {b})"))
    })?;
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}

// B_{2j} / (2j)! for j = 1..=12
const BERNOULLI_OVER_FACTORIAL: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
    -174611.0 / 802857662698291200000.0,
    77683.0 / 14101100039391805440000.0,
    -236364091.0 / 1710012252724199424000000000.0,
];

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    ensure(s > 1.0 && q > 0.0, || {
        Error::Domain(format!("Hurwitz zeta needs s > 1 and q > 0, got s={s}, q={q}"))
    })?;
    const N: usize = 16;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // term j: B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * a^{-s-2j+1}
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = c * rising * power;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= a * a;
    }
    Ok(sum)
}

pub fn zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}
