//! Reference values for the normalized stable tree: height moments, the
//! mean of `Z_{alpha,0}`, the second-moment and first-moment identities and
//! the Mittag-Leffler moments of the tilted leaf height.
//!
//! Quantities with both a closed form and an integral representation expose
//! both, so that one can be checked against the other.

pub mod quadrature;
pub mod special;

use serde::Serialize;

use crate::error::{check_gamma, ensure, Error, Result};
use special::{beta, ln_gamma};

const QUAD_TOL: f64 = 1e-10;
/// Largest quadrature error estimate an oracle may report.
pub const QUAD_ACCEPT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleValue {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub value: f64,
    pub method: Method,
    pub abs_err: Option<f64>,
}

impl OracleValue {
    fn closed(name: &str, params: &[(&str, f64)], value: f64) -> Self {
        Self {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            method: Method::ClosedForm,
            abs_err: None,
        }
    }

    fn quad(name: &str, params: &[(&str, f64)], q: quadrature::Quadrature, scale: f64) -> Result<Self> {
        let abs_err = q.abs_err * scale.abs();
        ensure(abs_err <= QUAD_ACCEPT, || {
            Error::Numerical(format!(
                "{name}: quadrature error estimate {abs_err:e} exceeds {QUAD_ACCEPT:e} ({} intervals)",
                q.intervals
            ))
        })?;
        Ok(Self {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value: q.value * scale,
            method: Method::Quadrature,
            abs_err: Some(abs_err),
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    ensure(alpha.is_finite() && alpha >= 0.0, || {
        Error::Domain(format!("alpha must be >= 0, got {alpha}"))
    })
}

/// `E[ int H(x)^{-p} mu(dx) ]` under the normalized stable law, `p < 2`.
pub fn height_moment(gamma: f64, p: f64) -> Result<f64> {
    check_gamma(gamma)?;
    ensure(p < 2.0, || Error::Domain(format!("height moment infinite for p = {p} >= 2")))?;
    let theta = 1.0 - 1.0 / gamma;
    let ln = (gamma - 1.0).ln() + (p - 1.0) * gamma.ln() + ln_gamma(theta)? + ln_gamma(2.0 - p)?
        - ln_gamma(1.0 - (p - 1.0) * theta)?;
    Ok(ln.exp())
}

/// `E[Z_{alpha,0}] = B(alpha + 1 - 1/gamma, 1 - 1/gamma) / |Gamma(-1/gamma)|`.
pub fn mean_z_alpha0(gamma: f64, alpha: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let theta = 1.0 - 1.0 / gamma;
    Ok(beta(alpha + theta, theta)? / special::gamma(-1.0 / gamma)?.abs())
}

fn second_moment_prefactor(gamma: f64) -> Result<f64> {
    let g = special::gamma(1.0 - 1.0 / gamma)?;
    Ok(2.0 / (gamma * gamma * g * g))
}

/// `E[ int mu(dx) (int_0^{H(x)} sigma_{r,x}^alpha dr)^2 ]` in closed form.
pub fn second_moment_closed(gamma: f64, alpha: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let theta = 1.0 - 1.0 / gamma;
    Ok(second_moment_prefactor(gamma)?
        * beta(2.0 * alpha + 2.0 * theta, theta)?
        * beta(alpha + theta, theta)?)
}

/// The same quantity by nested quadrature of the double integral
/// `c int_0^1 y^a (1-y)^{-1/g} int_0^y z^{a-1/g} (y-z)^{-1/g} dz dy`.
pub fn second_moment_quadrature(gamma: f64, alpha: f64) -> Result<OracleValue> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let theta = 1.0 - 1.0 / gamma;
    let tol = QUAD_TOL * 1e-2;
    // Inner integral over z in [0, y], substituted z = y w:
    //   y^{alpha + 1 - 2/gamma} int_0^1 w^{alpha - 1/gamma} (1-w)^{-1/gamma} dw.
    // The inner factor is recomputed at each y so the two levels stay independent.
    let inner_reduced = |_y: f64| -> f64 {
        quadrature::beta_kernel(alpha + theta, theta, |_| 1.0, tol, tol)
            .map(|q| q.value)
            .unwrap_or(f64::NAN)
    };
    // Outer: y^alpha (1-y)^{-1/gamma} y^{alpha+1-2/gamma} = y^{(2 alpha + 2 - 2/gamma) - 1} (1-y)^{theta - 1}
    let q = quadrature::beta_kernel(2.0 * alpha + 2.0 * theta, theta, inner_reduced, tol, tol)?;
    ensure(q.value.is_finite(), || {
        Error::Numerical(format!("inner quadrature failed for gamma={gamma}, alpha={alpha}"))
    })?;
    OracleValue::quad(
        "second_moment_rhs",
        &[("gamma", gamma), ("alpha", alpha)],
        q,
        second_moment_prefactor(gamma)?,
    )
}

/// Closed form and quadrature of the second-moment identity; errors if they
/// disagree by more than [`QUAD_ACCEPT`].
pub fn second_moment_rhs(gamma: f64, alpha: f64) -> Result<OracleValue> {
    let closed = second_moment_closed(gamma, alpha)?;
    let quad = second_moment_quadrature(gamma, alpha)?;
    ensure((closed - quad.value).abs() <= QUAD_ACCEPT, || {
        Error::Numerical(format!(
            "second moment: closed form {closed} vs quadrature {} (gamma={gamma}, alpha={alpha})",
            quad.value
        ))
    })?;
    Ok(quad)
}

/// `(1 / (gamma Gamma(1-1/gamma))) int_0^1 a^{-1/gamma} (1-a)^{-1/gamma} a^alpha da`
/// by quadrature; equals `E[Z_{alpha,0}]`.
pub fn first_moment_psi_rhs(gamma: f64, alpha: f64) -> Result<OracleValue> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let theta = 1.0 - 1.0 / gamma;
    let q = quadrature::beta_kernel(alpha + theta, theta, |_| 1.0, QUAD_TOL * 1e-2, QUAD_TOL * 1e-2)?;
    OracleValue::quad(
        "first_moment_psi_rhs",
        &[("gamma", gamma), ("alpha", alpha)],
        q,
        1.0 / (gamma * special::gamma(theta)?),
    )
}

/// Moments `Gamma(p+1) / Gamma(p (1 - 1/gamma) + 1)` of the Mittag-Leffler
/// law of `gamma H(U)` under the `H(U)^{-1}`-tilted measure, `p > -1`.
pub fn mittag_leffler_moment(gamma: f64, p: f64) -> Result<f64> {
    check_gamma(gamma)?;
    ensure(p > -1.0, || Error::Domain(format!("Mittag-Leffler moment needs p > -1, got {p}")))?;
    Ok((ln_gamma(p + 1.0)? - ln_gamma(p * (1.0 - 1.0 / gamma) + 1.0)?).exp())
}

/// Normalizing constant `c_gamma = (gamma - 1) Gamma(1 - 1/gamma)` of the tilt.
pub fn tilt_constant(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((gamma - 1.0) * special::gamma(1.0 - 1.0 / gamma)?)
}

/// `E[S_1^p]` for the subordinator with Laplace exponent
/// `gamma lambda^{1-1/gamma}`, finite for `p < 1 - 1/gamma`.
pub fn subordinator_moment(gamma: f64, p: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let a = 1.0 - 1.0 / gamma;
    ensure(p < a, || {
        Error::Domain(format!("moment of order {p} is infinite (needs p < {a})"))
    })?;
    Ok((p * gamma / (gamma - 1.0) * gamma.ln() + ln_gamma(1.0 - p / a)? - ln_gamma(1.0 - p)?).exp())
}

/// Evaluate an oracle by name, as exposed on the command line.
pub fn evaluate(name: &str, gamma: f64, p: Option<f64>, alpha: Option<f64>) -> Result<OracleValue> {
    let need_p = || p.ok_or_else(|| Error::Config(format!("oracle {name} needs --p")));
    let need_alpha = || alpha.ok_or_else(|| Error::Config(format!("oracle {name} needs --alpha")));
    match name {
        "height_moment" => {
            let p = need_p()?;
            Ok(OracleValue::closed(name, &[("gamma", gamma), ("p", p)], height_moment(gamma, p)?))
        }
        "mean_z_alpha0" => {
            let a = need_alpha()?;
            Ok(OracleValue::closed(name, &[("gamma", gamma), ("alpha", a)], mean_z_alpha0(gamma, a)?))
        }
        "second_moment_rhs" => second_moment_rhs(gamma, need_alpha()?),
        "first_moment_psi_rhs" => first_moment_psi_rhs(gamma, need_alpha()?),
        "mittag_leffler_moment" => {
            let p = need_p()?;
            Ok(OracleValue::closed(
                name,
                &[("gamma", gamma), ("p", p)],
                mittag_leffler_moment(gamma, p)?,
            ))
        }
        "subordinator_moment" => {
            let p = need_p()?;
            Ok(OracleValue::closed(
                name,
                &[("gamma", gamma), ("p", p)],
                subordinator_moment(gamma, p)?,
            ))
        }
        other => Err(Error::Config(format!(
            "unknown oracle {other}; expected one of {}",
            ORACLE_NAMES.join(", ")
        ))),
    }
}

pub const ORACLE_NAMES: [&str; 6] = [
    "height_moment",
    "mean_z_alpha0",
    "second_moment_rhs",
    "first_moment_psi_rhs",
    "mittag_leffler_moment",
    "subordinator_moment",
];
