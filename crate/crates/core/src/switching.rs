//! Coherences after the control field is switched off (storage) and on
//! (retrieval), the transfer efficiency ε_t and the switch-on efficiency ε_r.
//!
//! The closed forms are written with the normalized Bessel function
//! Ĵ_ν(x) = Γ(ν+1)(x/2)^(-ν) J_ν(x), which removes the Gamma prefactors and the
//! (x/2)^ν growth that overflow for large |α̃|. [`switch_off_bessel_gamma`]
//! keeps the explicit J·Γ products for cross-checking.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ode::{Dopri5, Dopri5Options};
use crate::params::{PhysicalParams, Stage};
use crate::specfun::{bessel_j, complex_gamma, normalized_bessel};
use crate::{Error, Result};

/// Switch-off (and switch-on) is treated as complete after this many 1/k.
pub const COMPLETE_SWITCH_SPAN: f64 = 25.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherencePair {
    pub r12: Complex64,
    pub r13: Complex64,
}

impl CoherencePair {
    pub fn new(r12: Complex64, r13: Complex64) -> Self {
        CoherencePair { r12, r13 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.r12.norm_sqr() + self.r13.norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchOnCoefficients {
    pub c12: Complex64,
    pub c13: Complex64,
}

impl SwitchOnCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.c12.norm_sqr() + self.c13.norm_sqr()
    }
}

fn check_rate(name: &str, k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("{name} must be positive, got {k}")));
    }
    Ok(())
}

/// ζ₁₂ and ζ₁₃ for one atom.
pub fn zeta_factors(params: &PhysicalParams, delta1: f64, raman: f64) -> Result<(f64, f64)> {
    let d = params.delta01 + delta1 - raman;
    if d == 0.0 {
        return Err(Error::domain(
            "Δ₀,₁ + δ₁ − Δ₁ = 0: atom is resonant, outside the off-resonant regime",
        ));
    }
    let om = params.omega1_rabi;
    Ok((om / (d + 2.0 * om * om / d), om / d))
}

/// Coherences left on one atom by the stored signal component `a_spectral`:
/// R₁₂ = iζ₁₂ a, R₁₃ = ζ₁₃ R₁₂.
pub fn init_coherence_after_storage(
    params: &PhysicalParams,
    delta1: f64,
    raman: f64,
    a_spectral: Complex64,
) -> Result<CoherencePair> {
    let (z12, z13) = zeta_factors(params, delta1, raman)?;
    let r12 = I * z12 * a_spectral;
    Ok(CoherencePair::new(r12, z13 * r12))
}

/// α̃ = (Δ₀,₁ + δ₁ − Δ₁ − i(γ₃₁ − γ₂₁))/k.
pub fn alpha_tilde(params: &PhysicalParams, delta1: f64, raman: f64) -> Complex64 {
    Complex64::new(params.delta01 + delta1 - raman, -(params.gamma31 - params.gamma21)) / params.k_off
}

fn free_phases(params: &PhysicalParams, delta1: f64, raman: f64, s: f64) -> (Complex64, Complex64) {
    let e12 = (-(Complex64::new(params.gamma21, raman)) * s).exp();
    let e13 = (-(Complex64::new(params.gamma31, params.delta01 + delta1)) * s).exp();
    (e12, e13)
}

/// Asymptotic coherences a time `elapsed` after the switch-off starts,
/// valid once Ω e^{-k·elapsed}/k is negligible.
pub fn switch_off_at(
    params: &PhysicalParams,
    initial: CoherencePair,
    delta1: f64,
    raman: f64,
    elapsed: f64,
) -> Result<CoherencePair> {
    check_rate("k_off", params.k_off)?;
    let at = alpha_tilde(params, delta1, raman);
    let p = (1.0 + I * at) / 2.0;
    let x = params.omega1_rabi / params.k_off;
    if p.norm() < 1e-300 || (1.0 - p).norm() < 1e-300 {
        return Err(Error::domain("α̃ = ±i: degenerate switch-off"));
    }
    let (c12, c13) = if x == 0.0 {
        (initial.r12, initial.r13)
    } else {
        let c12 = normalized_bessel(p - 1.0, x)? * initial.r12
            + I * x / (2.0 * p) * normalized_bessel(p, x)? * initial.r13;
        let c13 = I * x / (2.0 * (1.0 - p)) * normalized_bessel(1.0 - p, x)? * initial.r12
            + normalized_bessel(-p, x)? * initial.r13;
        (c12, c13)
    };
    let (e12, e13) = free_phases(params, delta1, raman, elapsed);
    Ok(CoherencePair::new(e12 * c12, e13 * c13))
}

/// Coherences at complete switch-off, τ̃₁ − τ₀ = 25/k.
pub fn switch_off_coherences(
    params: &PhysicalParams,
    initial: CoherencePair,
    delta1: f64,
    raman: f64,
) -> Result<CoherencePair> {
    check_rate("k_off", params.k_off)?;
    switch_off_at(params, initial, delta1, raman, COMPLETE_SWITCH_SPAN / params.k_off)
}

/// Same asymptotic solution written with explicit J_ν and Γ products:
/// c₁₂ = Γ(p)(x/2)^{1−p}[J_{p−1} R₁₂ + iJ_p R₁₃],
/// c₁₃ = Γ(1−p)(x/2)^{p}[iJ_{1−p} R₁₂ + J_{−p} R₁₃], p = (1+iα̃)/2.
pub fn switch_off_bessel_gamma(
    params: &PhysicalParams,
    initial: CoherencePair,
    delta1: f64,
    raman: f64,
) -> Result<CoherencePair> {
    check_rate("k_off", params.k_off)?;
    let at = alpha_tilde(params, delta1, raman);
    let p = (1.0 + I * at) / 2.0;
    let x = params.omega1_rabi / params.k_off;
    if !(x > 0.0) {
        return Err(Error::domain("explicit Bessel form needs Ω₁,₀ > 0"));
    }
    let h = Complex64::new(x / 2.0, 0.0);
    let a12 = complex_gamma(p)? * h.powc(1.0 - p);
    let a13 = complex_gamma(1.0 - p)? * h.powc(p);
    let c12 = a12 * (bessel_j(p - 1.0, x)? * initial.r12 + I * bessel_j(p, x)? * initial.r13);
    let c13 = a13 * (I * bessel_j(1.0 - p, x)? * initial.r12 + bessel_j(-p, x)? * initial.r13);
    let (e12, e13) = free_phases(params, delta1, raman, COMPLETE_SWITCH_SPAN / params.k_off);
    let out = CoherencePair::new(e12 * c12, e13 * c13);
    if !(out.norm_sqr().is_finite()) {
        return Err(Error::SpecFun(crate::specfun::SpecFunError::Overflow));
    }
    Ok(out)
}

fn switch_off_rhs(
    params: &PhysicalParams,
    delta1: f64,
    raman: f64,
) -> impl Fn(f64, &[Complex64], &mut [Complex64]) {
    let om = params.omega1_rabi;
    let k = params.k_off;
    let d = params.delta01 + delta1 - raman;
    let (g21, g31) = (params.gamma21, params.gamma31);
    move |s, y, dy| {
        let drive = om * (-k * s).exp();
        let rot = Complex64::from_polar(1.0, -d * s);
        dy[0] = -g21 * y[0] + I * drive * rot * y[1];
        dy[1] = -g31 * y[1] + I * drive * rot.conj() * y[0];
    }
}

fn ode_options(scale: f64) -> Dopri5Options {
    Dopri5Options {
        rtol: 1e-11,
        atol: 1e-13 * scale.max(1e-300),
        ..Default::default()
    }
}

/// Direct adaptive integration of the switch-off equations, sampled at the
/// requested elapsed times (nondecreasing, measured from τ₀).
pub fn switch_off_ode_trajectory(
    params: &PhysicalParams,
    initial: CoherencePair,
    delta1: f64,
    raman: f64,
    times: &[f64],
) -> Result<Vec<CoherencePair>> {
    check_rate("k_off", params.k_off)?;
    let f = switch_off_rhs(params, delta1, raman);
    let mut y = [initial.r12, initial.r13];
    let mut stepper = Dopri5::new(ode_options(initial.norm_sqr().sqrt()));
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        if ts < t {
            return Err(Error::domain("sample times must be nondecreasing and ≥ 0"));
        }
        stepper.integrate(&f, t, &mut y, ts)?;
        t = ts;
        // Decays stay in the equations; only the detuning phases are restored.
        let p12 = Complex64::from_polar(1.0, -raman * t);
        let p13 = Complex64::from_polar(1.0, -(params.delta01 + delta1) * t);
        out.push(CoherencePair::new(p12 * y[0], p13 * y[1]));
    }
    Ok(out)
}

/// ODE oracle for [`switch_off_at`]; `horizon` must be at least 20/k.
pub fn switch_off_ode_oracle(
    params: &PhysicalParams,
    initial: CoherencePair,
    delta1: f64,
    raman: f64,
    horizon: f64,
) -> Result<CoherencePair> {
    check_rate("k_off", params.k_off)?;
    if horizon < 20.0 / params.k_off {
        return Err(Error::domain(format!(
            "horizon {horizon} is shorter than 20/k = {}",
            20.0 / params.k_off
        )));
    }
    Ok(switch_off_ode_trajectory(params, initial, delta1, raman, &[horizon])?[0])
}

/// ε_t = |R₁₂(τ̃₁)|²/(|R₁₂(τ₀)|² + |R₁₃(τ₀)|²) for one atom.
pub fn transfer_efficiency(params: &PhysicalParams, delta1: f64, raman: f64) -> Result<f64> {
    let init = init_coherence_after_storage(params, delta1, raman, Complex64::new(1.0, 0.0))?;
    if init.norm_sqr() == 0.0 {
        return Err(Error::domain("no stored coherence (Ω₁,₀ = 0)"));
    }
    let out = switch_off_coherences(params, init, delta1, raman)?;
    Ok((out.r12.norm_sqr() / init.norm_sqr()).clamp(0.0, 1.0))
}

/// |R₁₃(τ̃₁)/R₁₃(τ₀)|² for one atom.
pub fn remnant_r13(params: &PhysicalParams, delta1: f64, raman: f64) -> Result<f64> {
    let init = init_coherence_after_storage(params, delta1, raman, Complex64::new(1.0, 0.0))?;
    if init.r13.norm_sqr() == 0.0 {
        return Err(Error::domain("no stored coherence (Ω₁,₀ = 0)"));
    }
    let out = switch_off_coherences(params, init, delta1, raman)?;
    Ok(out.r13.norm_sqr() / init.r13.norm_sqr())
}

/// Switch-on coefficients for a drive Ω₀e^{k(τ−τ̃)} and a complex detuning
/// difference `d3_minus_d2` = (Δ₀,₂ + δ₁ − Δ₂) − i(γ₃₁ − γ₂₁).
///
/// R₁₂(τ̃) = C₁₂ R₁₂^free(τ̃) and R₁₃(τ̃) = iC₁₃ R₁₂^free(τ̃), where R^free is the
/// coherence the atom would have had with the field kept off.
pub fn switch_on_coefficients_for(rabi: f64, k_on: f64, d3_minus_d2: Complex64) -> Result<SwitchOnCoefficients> {
    check_rate("k_on", k_on)?;
    let x = rabi / k_on;
    let b = d3_minus_d2 / k_on;
    let q = (1.0 - I * b) / 2.0;
    if (1.0 - q).norm() < 1e-300 {
        return Err(Error::domain("degenerate switch-on detuning"));
    }
    if x == 0.0 {
        return Ok(SwitchOnCoefficients {
            c12: Complex64::new(1.0, 0.0),
            c13: Complex64::new(0.0, 0.0),
        });
    }
    let c12 = normalized_bessel(-q, x)?;
    let c13 = (x / 2.0) / (1.0 - q) * normalized_bessel(1.0 - q, x)?;
    Ok(SwitchOnCoefficients { c12, c13 })
}

/// C₁,₂ and C₁,₃ for the configured retrieval leg (δ₁ = Δ₂ = 0).
pub fn switch_on_coefficients(params: &PhysicalParams) -> Result<SwitchOnCoefficients> {
    switch_on_coefficients_for(
        params.omega2_rabi,
        params.k_on,
        Complex64::new(params.delta02, -(params.gamma31 - params.gamma21)),
    )
}

/// Time-reversed switch-off dynamics integrated from τ̃₂ − 25/k_r to τ̃₂,
/// starting from R₁₂^free = 1, R₁₃ = 0.
pub fn switch_on_ode_oracle_for(rabi: f64, k_on: f64, d3_minus_d2: Complex64) -> Result<SwitchOnCoefficients> {
    check_rate("k_on", k_on)?;
    let span = COMPLETE_SWITCH_SPAN / k_on;
    let d = d3_minus_d2.re;
    let g = -d3_minus_d2.im;
    let f = move |s: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let drive = rabi * (k_on * s).exp();
        let rot = (-(Complex64::new(g, d)) * s).exp();
        dy[0] = I * drive * rot * y[1];
        dy[1] = I * drive / rot * y[0];
    };
    let mut y = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut stepper = Dopri5::new(ode_options(1.0));
    stepper.integrate(f, -span, &mut y, 0.0)?;
    Ok(SwitchOnCoefficients {
        c12: y[0],
        c13: -I * y[1],
    })
}

pub fn switch_on_ode_oracle(params: &PhysicalParams) -> Result<SwitchOnCoefficients> {
    switch_on_ode_oracle_for(
        params.omega2_rabi,
        params.k_on,
        Complex64::new(params.delta02, -(params.gamma31 - params.gamma21)),
    )
}

/// ε_r = |C₁,₂|² + |√η Ω₁,₀/Δ₀,₁ · C₁,₃|².
pub fn switch_on_efficiency(params: &PhysicalParams) -> Result<f64> {
    let c = switch_on_coefficients(params)?;
    let w = params.eta.sqrt() * params.coupling_ratio(Stage::First);
    Ok((c.c12.norm_sqr() + (w * c.c13).norm_sqr()).clamp(0.0, 1.0))
}
