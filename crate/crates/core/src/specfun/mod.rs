//! Special functions for the switching solutions: complex Gamma, Bessel J of
//! complex order, and the cross product M.

mod bessel;
mod dd;
mod faddeeva;
mod gamma;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::ode::OdeError;

pub use bessel::{bessel_j, bessel_j_ode, hyp0f1_series, normalized_bessel, SERIES_LIMIT};
pub use faddeeva::faddeeva;
pub use gamma::{complex_gamma, ln_gamma, recip_gamma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("pole of the Gamma function at {0}")]
    Pole(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("result overflows f64")]
    Overflow,
    #[error("series failed to converge")]
    NoConvergence,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Bessel ODE backend: {0}")]
    Ode(#[from] OdeError),
}

/// M = J_{(1+iα)/2} J_{(1-iα)/2} + J_{(-1+iα)/2} J_{(-1-iα)/2}, all at argument x.
pub fn bessel_cross_product_m(alpha_tilde: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain(format!("M requires x > 0, got {x}")));
    }
    let ia = Complex64::i() * alpha_tilde;
    let j = |nu: Complex64| bessel_j(nu, x);
    Ok(j((1.0 + ia) / 2.0)? * j((1.0 - ia) / 2.0)? + j((-1.0 + ia) / 2.0)? * j((-1.0 - ia) / 2.0)?)
}

/// Closed form of M from the Wronskian, 2 sin(πν)/(πx) with ν = (1+iα)/2.
pub fn cross_product_m_closed_form(alpha_tilde: Complex64, x: f64) -> Complex64 {
    let nu = (1.0 + Complex64::i() * alpha_tilde) / 2.0;
    2.0 * (PI * nu).sin() / (PI * x)
}
