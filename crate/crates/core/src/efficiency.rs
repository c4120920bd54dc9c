//! Analytic echo-efficiency model: complex Raman absorption, dephasing of the
//! optical inhomogeneous line, echo timing, envelope map and the factorized
//! quantum efficiency.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envelope::{Direction, Domain, FieldEnvelope};
use crate::params::{optical_quadrature_nodes, BroadeningSpec, LineShape, OpticalLine, PhysicalParams, RamanLine, Stage};
use crate::quad;
use crate::specfun::faddeeva;
use crate::switching::{switch_on_coefficients, switch_on_efficiency, transfer_efficiency};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AbsorptionMode {
    /// Closed forms: Faddeeva for Gaussian, pole residue for Lorentzian.
    #[default]
    Closed,
    /// Adaptive quadrature of the reduced line integral.
    Quadrature,
    /// γ_eff → 0 limit, πG(ν) plus a principal-value dispersion.
    PrincipalValue,
    /// Linear response of the three-level equations without adiabatic
    /// elimination, including the background 1↔3 dispersion.
    Full,
}

/// β used by the model: the configured value, or the one implied by the
/// optical depth when β is left at zero.
pub fn resolved_beta(params: &PhysicalParams, broadening: &BroadeningSpec) -> Result<f64> {
    if params.beta > 0.0 {
        Ok(params.beta)
    } else {
        params.beta_from_depth(broadening)
    }
}

fn raman_shape(broadening: &BroadeningSpec) -> Option<LineShape> {
    match broadening.raman_line {
        RamanLine::Gaussian { width } => Some(LineShape::Gaussian(width)),
        RamanLine::Lorentzian { width } => Some(LineShape::Lorentzian(width)),
        RamanLine::LongitudinalGradient { .. } => None,
    }
}

/// ∫ G(Δ) f(Δ) dΔ over a continuous Raman line, with a break at `peak`.
/// Lorentzians are integrated on the untruncated map Δ = w tan θ.
fn line_integral<F: Fn(f64) -> Complex64>(shape: LineShape, peak: f64, f: F) -> Complex64 {
    let run = |tol: f64| match shape {
        LineShape::Gaussian(s) => {
            let r = 14.0 * s;
            quad::integrate(|d| shape.density(d) * f(d), -r, r, &[peak], tol)
        }
        LineShape::Lorentzian(w) => {
            let h = 0.5 * PI;
            quad::integrate(|t| f(w * t.tan()) / PI, -h, h, &[(peak / w).atan()], tol)
        }
    };
    let rough = run(1e-6);
    run(1e-13 * rough.norm().max(1e-300))
}

/// Complex absorption coefficient α₁(ν, Z) of the signal field; Re α₁ is the
/// intensity absorption per unit length and Im α₁ the dispersion.
pub fn complex_absorption(
    params: &PhysicalParams,
    broadening: &BroadeningSpec,
    nu: f64,
    z: f64,
    mode: AbsorptionMode,
) -> Result<Complex64> {
    let beta = resolved_beta(params, broadening)?;
    let c2 = params.coupling_ratio(Stage::First).powi(2);
    if mode != AbsorptionMode::Full && (c2 == 0.0 || beta == 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = params.gamma_eff();
    let pre = beta * c2;
    match mode {
        AbsorptionMode::Closed => match broadening.raman_line {
            RamanLine::Gaussian { width } => {
                let zeta = Complex64::new(nu, g) / (std::f64::consts::SQRT_2 * width);
                Ok(pre * (PI / 2.0).sqrt() * faddeeva(zeta) / width)
            }
            RamanLine::Lorentzian { width } => Ok(-I * pre / Complex64::new(-nu, -(g + width))),
            RamanLine::LongitudinalGradient { .. } => gradient_absorption(params, broadening, pre, nu, z, g),
        },
        AbsorptionMode::Quadrature => {
            let Some(shape) = raman_shape(broadening) else {
                return gradient_absorption(params, broadening, pre, nu, z, g);
            };
            if g <= 0.0 {
                return Err(Error::domain("singular line integral at γ_eff = 0; use principal-value mode"));
            }
            Ok(-I * pre * line_integral(shape, nu, |d| 1.0 / Complex64::new(d - nu, -g)))
        }
        AbsorptionMode::PrincipalValue => {
            let Some(shape) = raman_shape(broadening) else {
                return Err(Error::Unsupported("principal value of a delta-distributed line".into()));
            };
            Ok(pre * (PI * shape.density(nu) - I * principal_value(shape, nu)))
        }
        AbsorptionMode::Full => full_absorption(params, broadening, beta, nu, z),
    }
}

fn gradient_absorption(
    params: &PhysicalParams,
    broadening: &BroadeningSpec,
    pre: f64,
    nu: f64,
    z: f64,
    g: f64,
) -> Result<Complex64> {
    let x = broadening.gradient_detuning(z, params.medium_length).unwrap_or(0.0);
    let den = Complex64::new(x - nu, -g);
    if den.norm() == 0.0 {
        return Err(Error::domain("signal frequency on the local gradient resonance with γ_eff = 0"));
    }
    Ok(-I * pre / den)
}

/// PV ∫G(Δ)/(Δ − ν) dΔ = ∫₀^∞ (G(ν+u) − G(ν−u))/u du.
fn principal_value(shape: LineShape, nu: f64) -> f64 {
    let f = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            (shape.density(nu + u) - shape.density(nu - u)) / u
        }
    };
    let run = |tol: f64| match shape {
        LineShape::Gaussian(s) => quad::integrate(|u| Complex64::new(f(u), 0.0), 0.0, nu.abs() + 14.0 * s, &[nu.abs()], tol),
        LineShape::Lorentzian(w) => {
            let top = 0.5 * PI;
            quad::integrate(
                |t| {
                    let c = t.cos();
                    Complex64::new(if c == 0.0 { 0.0 } else { f(w * t.tan()) * w / (c * c) }, 0.0)
                },
                0.0,
                top,
                &[(nu.abs() / w).atan()],
                tol,
            )
        }
    };
    let rough = run(1e-6);
    run(1e-13 * rough.norm().max(1e-300)).re
}

/// −iβ Σ_δ w ∫dΔ̃ G₂ (D₂ − ν)/((D₃ − ν)(D₂ − ν) − Ω²), with D₂ = Δ − iγ₂₁ for
/// the bare Raman detuning Δ = Δ̃ + Ω²/Δ₀ and D₃ = Δ₀ + δ − iγ₃₁.
fn full_absorption(params: &PhysicalParams, broadening: &BroadeningSpec, beta: f64, nu: f64, z: f64) -> Result<Complex64> {
    let om = params.omega1_rabi;
    let shift = om * om / params.delta01;
    let (dn, dw) = optical_quadrature_nodes(broadening, broadening.quadrature.optical_nodes.max(1))?;
    let kernel = |delta: f64, shifted: f64| {
        let d2 = Complex64::new(shifted + shift - nu, -params.gamma21);
        let d3 = Complex64::new(params.delta01 + delta - nu, -params.gamma31);
        d2 / (d3 * d2 - om * om)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (&delta, &w) in dn.iter().zip(&dw) {
        let v = match raman_shape(broadening) {
            Some(shape) => {
                if params.gamma_eff() <= 0.0 && om > 0.0 {
                    return Err(Error::domain("singular line integral at γ_eff = 0"));
                }
                line_integral(shape, nu, |d| kernel(delta, d))
            }
            None => kernel(delta, broadening.gradient_detuning(z, params.medium_length).unwrap_or(0.0)),
        };
        acc += w * v;
    }
    Ok(-I * beta * acc)
}

/// ∫₀^L α₁(ν, Z) dZ in the reduced model, closed form for every line.
pub fn integrated_absorption(params: &PhysicalParams, broadening: &BroadeningSpec, nu: f64) -> Result<Complex64> {
    let l = params.medium_length;
    match broadening.raman_line {
        RamanLine::LongitudinalGradient { chi } => {
            let beta = resolved_beta(params, broadening)?;
            let pre = beta * params.coupling_ratio(Stage::First).powi(2);
            if pre == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let g = params.gamma_eff();
            let (x0, x1) = (-0.5 * chi * l - nu, 0.5 * chi * l - nu);
            // −i(pre/χ)·ln((x₁ − iγ)/(x₀ − iγ)), with the branch taken along the path.
            let re = (pre / chi.abs()) * if g > 0.0 {
                (x1.max(x0) / g).atan() - (x1.min(x0) / g).atan()
            } else if x0.min(x1) < 0.0 && x0.max(x1) > 0.0 {
                PI
            } else {
                0.0
            };
            let im = -(pre / chi) * 0.5 * ((x1 * x1 + g * g) / (x0 * x0 + g * g)).ln();
            Ok(Complex64::new(re, im))
        }
        _ => Ok(l * complex_absorption(params, broadening, nu, 0.0, AbsorptionMode::Closed)?),
    }
}

/// Real Raman absorption depth D(ν) = Re ∫α₁dZ.
pub fn absorption_depth(params: &PhysicalParams, broadening: &BroadeningSpec, nu: f64) -> Result<f64> {
    Ok(integrated_absorption(params, broadening, nu)?.re)
}

/// τ_echo(η) = (1 + 1/η)/2 · τ_echo(1).
pub fn echo_time(eta: f64, tau_echo_unit: f64) -> f64 {
    0.5 * (1.0 + 1.0 / eta) * tau_echo_unit
}

/// Raman-shifted optical width δ₁,R = δ₁,in(Ω₁,₀/Δ₀,₁)².
pub fn raman_shift_width(params: &PhysicalParams, optical: OpticalLine) -> f64 {
    let w = match optical {
        OpticalLine::None => 0.0,
        OpticalLine::Gaussian { width } | OpticalLine::Lorentzian { width } => width,
    };
    w * params.coupling_ratio(Stage::First).powi(2)
}

/// Γ_G or Γ_L for the optical line, with Ω₂,₀/Δ₀,₂ = √η Ω₁,₀/Δ₀,₁.
pub fn dephasing_factor(params: &PhysicalParams, optical: OpticalLine) -> Result<f64> {
    let t = echo_time(params.eta, params.tau_echo) - params.tau_st;
    if t < 0.0 {
        return Err(Error::domain(format!("echo time precedes the storage time by {}", -t)));
    }
    let c2 = params.coupling_ratio(Stage::First).powi(2);
    let eta = params.eta;
    Ok(match optical {
        OpticalLine::None => 1.0,
        OpticalLine::Gaussian { width } => (-0.25 * c2 * c2 * (1.0 + eta * eta) * (width * t).powi(2)).exp(),
        OpticalLine::Lorentzian { width } => (-0.5 * c2 * (1.0 + eta) * width * t).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBreakdown {
    pub eps_t: f64,
    pub eps_r: f64,
    pub gamma_factor: f64,
    pub storage_decay: f64,
    pub depth_factor: f64,
    pub total: f64,
    pub raman_shift_width: f64,
}

impl EfficiencyBreakdown {
    pub fn from_factors(eps_t: f64, eps_r: f64, gamma_factor: f64, storage_decay: f64, depth_factor: f64) -> Self {
        EfficiencyBreakdown {
            eps_t,
            eps_r,
            gamma_factor,
            storage_decay,
            depth_factor,
            total: eps_t * eps_r * gamma_factor * gamma_factor * storage_decay * depth_factor,
            raman_shift_width: 0.0,
        }
    }

    /// Real ε̃ = ε_t ε_r Γ², the energy transfer of the atomic stages.
    pub fn eps_tilde(&self) -> f64 {
        self.eps_t * self.eps_r * self.gamma_factor * self.gamma_factor
    }

    pub const COLUMNS: [&'static str; 7] = [
        "eps_t",
        "eps_r",
        "gamma_factor",
        "storage_decay",
        "depth_factor",
        "total",
        "raman_shift_width",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.eps_t,
            self.eps_r,
            self.gamma_factor,
            self.storage_decay,
            self.depth_factor,
            self.total,
            self.raman_shift_width,
        ]
    }
}

/// |1 − e^{−κ}|² for the working depth.
pub fn depth_factor(kappa: f64) -> f64 {
    (1.0 - (-kappa).exp()).powi(2)
}

/// ε = ε_t ε_r Γ² e^{−2γ₂₁τ_echo(η)} |1 − e^{−κ}|², with ε_t taken at the line centre.
pub fn overall_efficiency(params: &PhysicalParams, broadening: &BroadeningSpec) -> Result<EfficiencyBreakdown> {
    params.validate()?;
    let eps_t = transfer_efficiency(params, 0.0, 0.0)?;
    let eps_r = switch_on_efficiency(params)?;
    let gamma_factor = dephasing_factor(params, broadening.optical_line)?;
    let storage_decay = (-2.0 * params.gamma21 * echo_time(params.eta, params.tau_echo)).exp();
    let mut b = EfficiencyBreakdown::from_factors(
        eps_t,
        eps_r,
        gamma_factor,
        storage_decay,
        depth_factor(params.effective_depth()),
    );
    b.raman_shift_width = raman_shift_width(params, broadening.optical_line);
    Ok(b)
}

/// Complex amplitude √ε̃ = √ε_t (C₁,₂ + i√η′(Ω₁,₀/Δ₀,₁)C₁,₃)Γ. Its modulus
/// differs from √(ε_t ε_r)Γ by the C₁₂/C₁₃ interference term.
pub fn eps_tilde_amplitude(params: &PhysicalParams, broadening: &BroadeningSpec) -> Result<Complex64> {
    let eps_t = transfer_efficiency(params, 0.0, 0.0)?;
    let c = switch_on_coefficients(params)?;
    let g = dephasing_factor(params, broadening.optical_line)?;
    let w = params.eta_prime.sqrt() * params.coupling_ratio(Stage::First);
    Ok(eps_t.sqrt() * (c.c12 + I * w * c.c13) * g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EchoMap {
    pub echo: FieldEnvelope,
    /// False when the depth varies across the input band and the spectral
    /// solution was used instead of the flat-depth map.
    pub flat_depth: bool,
}

/// Relative variation of |1 − e^{−D(ν)}| tolerated by the flat-depth map.
pub const FLAT_DEPTH_TOLERANCE: f64 = 1e-3;

/// E₂(τ) = √(ε̃η) E₁(−η(τ − τ_e)) e^{−γ₂₁τ_e}(1 − e^{−κ}), backward at Z = 0.
pub fn echo_envelope_map(
    params: &PhysicalParams,
    broadening: &BroadeningSpec,
    input: &FieldEnvelope,
    eps_tilde: Complex64,
) -> Result<EchoMap> {
    if input.domain != Domain::Time {
        return Err(Error::domain("echo map expects a time-domain envelope"));
    }
    let eta = params.eta;
    let te = echo_time(eta, params.tau_echo);
    let d0 = absorption_depth(params, broadening, 0.0)?;
    let band = 3.0 * input.rms_bandwidth();
    let bracket = |d: f64| 1.0 - (-d).exp();
    let mut flat = true;
    for j in 1..=8 {
        let nu = band * j as f64 / 8.0;
        for v in [nu, -nu] {
            let b = bracket(absorption_depth(params, broadening, v)?);
            if (b - bracket(d0)).abs() > FLAT_DEPTH_TOLERANCE * bracket(d0).abs().max(1e-300) {
                flat = false;
            }
        }
    }
    if !flat {
        let span = 2.0 * PI / input.axis.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let m = 2 * input.len() + 1;
        let nu_in: Vec<f64> = (0..m)
            .map(|i| -0.5 * span + span * i as f64 / (m - 1) as f64)
            .collect();
        let spec = input.spectrum(&nu_in)?;
        let out = echo_spectral_solution(params, broadening, &spec, eps_tilde)?;
        let tau: Vec<f64> = input.axis.iter().rev().map(|&t| te - t / eta).collect();
        let mut echo = out.to_time(&tau)?;
        echo.direction = Direction::Backward;
        echo.z = 0.0;
        return Ok(EchoMap { echo, flat_depth: false });
    }
    let amp = (eps_tilde * eta).sqrt() * (-params.gamma21 * te).exp() * bracket(d0);
    let axis: Vec<f64> = input.axis.iter().rev().map(|&t| te - t / eta).collect();
    let samples = input.samples.iter().rev().map(|&s| amp * s).collect();
    Ok(EchoMap {
        echo: FieldEnvelope::new(axis, samples, Domain::Time, 0.0, Direction::Backward)?,
        flat_depth: true,
    })
}

/// Ẽ₂(ν) = √(ε̃/η) e^{iντ_e} Ẽ₁(−ν/η)(1 − e^{−D(−ν/η)}) e^{−γ₂₁τ_e} at Z = 0.
pub fn echo_spectral_solution(
    params: &PhysicalParams,
    broadening: &BroadeningSpec,
    input_spectrum: &FieldEnvelope,
    eps_tilde: Complex64,
) -> Result<FieldEnvelope> {
    if params.eta_prime != params.eta {
        return Err(Error::Unsupported("echo solution needs η′ = η".into()));
    }
    if input_spectrum.domain != Domain::Frequency {
        return Err(Error::domain("spectral solution expects a frequency-domain envelope"));
    }
    let eta = params.eta;
    let te = echo_time(eta, params.tau_echo);
    let amp = (eps_tilde / eta).sqrt() * (-params.gamma21 * te).exp();
    let mut axis = Vec::with_capacity(input_spectrum.len());
    let mut samples = Vec::with_capacity(input_spectrum.len());
    for (&v1, &s) in input_spectrum.axis.iter().zip(&input_spectrum.samples).rev() {
        let nu = -eta * v1;
        let d = absorption_depth(params, broadening, v1)?;
        axis.push(nu);
        samples.push(amp * Complex64::from_polar(1.0, nu * te) * s * (1.0 - (-d).exp()));
    }
    FieldEnvelope::new(axis, samples, Domain::Frequency, 0.0, Direction::Backward)
}
