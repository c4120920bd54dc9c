//! Bessel J of complex order and nonnegative real argument.
//!
//! x <= SERIES_LIMIT: ascending series in double-double arithmetic.
//! x > SERIES_LIMIT: the Bessel ODE in the Liouville form u = sqrt(x) J,
//! u'' = -(1 - (ν² - 1/4)/x²) u, integrated from the series values at the limit.

use num_complex::Complex64;

use super::dd::{CDd, Dd};
use super::gamma::ln_gamma;
use super::SpecFunError;
use crate::ode::{Dopri5, Dopri5Options};

pub const SERIES_LIMIT: f64 = 20.0;

/// Normalized Bessel function Ĵ_ν(x) = Γ(ν+1)(x/2)^(-ν) J_ν(x) = ₀F₁(; ν+1; -x²/4),
/// summed directly. Valid for any x but only accurate while e^x stays well below
/// 1e32, so callers keep x <= SERIES_LIMIT.
pub fn hyp0f1_series(nu: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    if !x.is_finite() || !nu.re.is_finite() || !nu.im.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    let q = -(Dd::from_f64(x) * Dd::from_f64(x)) / Dd::from_f64(4.0);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let nu1 = CDd::from_c64(nu + 1.0);
    for m in 0..2000u32 {
        let mf = m as f64;
        let a = nu1.re + Dd::from_f64(mf);
        if a.hi == 0.0 && nu.im == 0.0 {
            return Err(SpecFunError::Pole(nu.re));
        }
        let den = CDd { re: a, im: nu1.im }.scale(Dd::from_f64(mf + 1.0));
        term = (term.scale(q)) / den;
        sum = sum + term;
        let shrinking = x * x / 4.0 < (mf + 1.0) * (a.hi.abs() + nu.im.abs()).max(1.0);
        if shrinking && term.norm1() <= 1e-33 * sum.norm1().max(1e-300) {
            return Ok(sum.to_c64());
        }
    }
    Err(SpecFunError::NoConvergence)
}

fn negative_integer(nu: Complex64) -> Option<i64> {
    (nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round()).then(|| nu.re as i64)
}

fn series_j(nu: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    let s = hyp0f1_series(nu, x)?;
    let pref = (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)?).exp();
    Ok(pref * s)
}

/// J_ν(x) via the Bessel ODE from `x0` (where the series is used) to `x`.
pub fn bessel_j_ode(nu: Complex64, x: f64, x0: f64) -> Result<Complex64, SpecFunError> {
    let j0 = bessel_j_series_or_int(nu, x0)?;
    let j1 = bessel_j_series_or_int(nu + 1.0, x0)?;
    let dj0 = nu / x0 * j0 - j1;
    let s = x0.sqrt();
    let mut y = [s * j0, j0 / (2.0 * s) + s * dj0];
    let scale = y[0].norm().max(y[1].norm()).max(1e-300);
    let c = nu * nu - 0.25;
    let mut stepper = Dopri5::new(Dopri5Options {
        rtol: 1e-12,
        atol: 1e-13 * scale,
        ..Default::default()
    });
    stepper.integrate(
        |t, y, dy| {
            dy[0] = y[1];
            dy[1] = -(1.0 - c / (t * t)) * y[0];
        },
        x0,
        &mut y,
        x,
    )?;
    Ok(y[0] / x.sqrt())
}

fn bessel_j_series_or_int(nu: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    if let Some(n) = negative_integer(nu) {
        let v = series_j(Complex64::new(-(n as f64), 0.0), x)?;
        return Ok(if n % 2 == 0 { v } else { -v });
    }
    series_j(nu, x)
}

/// J_ν(x) for complex order ν and real x >= 0.
pub fn bessel_j(nu: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    if !x.is_finite() || !nu.re.is_finite() || !nu.im.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    if x < 0.0 {
        return Err(SpecFunError::Domain(format!("negative argument x = {x}")));
    }
    if x == 0.0 {
        if nu == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if nu.re > 0.0 || negative_integer(nu).is_some() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(SpecFunError::Domain(format!("J_ν(0) is singular for ν = {nu}")));
    }
    let v = if x <= SERIES_LIMIT {
        bessel_j_series_or_int(nu, x)?
    } else {
        bessel_j_ode(nu, x, SERIES_LIMIT)?
    };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(SpecFunError::Overflow);
    }
    Ok(v)
}

/// Ĵ_ν(x) = ₀F₁(; ν+1; -x²/4) for any x >= 0, switching to the ODE backend
/// above SERIES_LIMIT unless |ν+1| ≥ x²/4, where the series terms never grow.
pub fn normalized_bessel(nu: Complex64, x: f64) -> Result<Complex64, SpecFunError> {
    if x <= SERIES_LIMIT || (nu + 1.0).norm() >= 0.25 * x * x {
        return hyp0f1_series(nu, x);
    }
    let j = bessel_j_ode(nu, x, SERIES_LIMIT)?;
    let v = (ln_gamma(nu + 1.0)? - nu * (x / 2.0).ln()).exp() * j;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(SpecFunError::Overflow);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_order_reflection() {
        let a = bessel_j(Complex64::new(-3.0, 0.0), 2.5).unwrap();
        let b = bessel_j(Complex64::new(3.0, 0.0), 2.5).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn j0_known_value() {
        // J0(2.404825557695773) is the first zero.
        let v = bessel_j(Complex64::new(0.0, 0.0), 2.404_825_557_695_773).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn zero_argument_singular_for_negative_order() {
        assert!(bessel_j(Complex64::new(-0.5, 0.0), 0.0).is_err());
    }
}
