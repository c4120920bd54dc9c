//! Physical parameters, inhomogeneous-broadening descriptors and grids.

use std::f64::consts::PI;

use gauss_quad::GaussHermite;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How `optical_depth` is interpreted when deriving β.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DepthReference {
    /// κ̃ is the Raman optical depth at the configured Δ₀,₁ and Ω₁,₀.
    #[default]
    Absolute,
    /// κ̃ is quoted for Ω₁,₀/Δ₀,₁ = 1; the working depth is κ̃(Ω₁,₀/Δ₀,₁)².
    Resonant,
}

/// Reading of the effective Raman linewidth γ_eff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaEffReading {
    /// γ₂₁ + γ₃₁(Ω/Δ₀)², the dimensionally consistent form.
    #[default]
    Squared,
    /// γ₂₁ + γ₃₁Ω²/Δ₀ as printed.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub omega1_rabi: f64,
    pub omega2_rabi: f64,
    pub delta01: f64,
    pub delta02: f64,
    pub gamma21: f64,
    pub gamma31: f64,
    pub beta: f64,
    pub eta: f64,
    pub eta_prime: f64,
    pub k_off: f64,
    pub k_on: f64,
    pub tau0: f64,
    /// Echo time at η = 1, measured from the input pulse centre.
    pub tau_echo: f64,
    pub tau_st: f64,
    pub medium_length: f64,
    pub optical_depth: f64,
    pub depth_reference: DepthReference,
    pub gamma_eff_reading: GammaEffReading,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            omega1_rabi: 1.0,
            omega2_rabi: 1.0,
            delta01: 20.0,
            delta02: 20.0,
            gamma21: 0.0,
            gamma31: 0.0,
            beta: 0.0,
            eta: 1.0,
            eta_prime: 1.0,
            k_off: 1.0,
            k_on: 20.0,
            tau0: 50.0,
            tau_echo: 200.0,
            tau_st: 0.0,
            medium_length: 1.0,
            optical_depth: 5.0,
            depth_reference: DepthReference::Absolute,
            gamma_eff_reading: GammaEffReading::Squared,
        }
    }
}

/// Storage (1) or retrieval (2) leg of the memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    First,
    Second,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega1_rabi", self.omega1_rabi),
            ("omega2_rabi", self.omega2_rabi),
            ("delta01", self.delta01),
            ("delta02", self.delta02),
            ("gamma21", self.gamma21),
            ("gamma31", self.gamma31),
            ("beta", self.beta),
            ("eta", self.eta),
            ("eta_prime", self.eta_prime),
            ("k_off", self.k_off),
            ("k_on", self.k_on),
            ("tau0", self.tau0),
            ("tau_echo", self.tau_echo),
            ("tau_st", self.tau_st),
            ("medium_length", self.medium_length),
            ("optical_depth", self.optical_depth),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(k, format!("must be finite, got {v}")));
            }
        }
        for (k, v) in [
            ("gamma21", self.gamma21),
            ("gamma31", self.gamma31),
            ("beta", self.beta),
            ("tau_st", self.tau_st),
            ("optical_depth", self.optical_depth),
            ("omega1_rabi", self.omega1_rabi),
            ("omega2_rabi", self.omega2_rabi),
        ] {
            if v < 0.0 {
                return Err(Error::config(k, format!("must be nonnegative, got {v}")));
            }
        }
        for (k, v) in [
            ("eta", self.eta),
            ("eta_prime", self.eta_prime),
            ("k_off", self.k_off),
            ("k_on", self.k_on),
            ("medium_length", self.medium_length),
        ] {
            if v <= 0.0 {
                return Err(Error::config(k, format!("must be positive, got {v}")));
            }
        }
        if self.delta01 == 0.0 {
            return Err(Error::config("delta01", "optical detuning must be nonzero"));
        }
        if self.delta02 == 0.0 {
            return Err(Error::config("delta02", "optical detuning must be nonzero"));
        }
        Ok(())
    }

    pub fn rabi(&self, stage: Stage) -> f64 {
        match stage {
            Stage::First => self.omega1_rabi,
            Stage::Second => self.omega2_rabi,
        }
    }

    pub fn optical_detuning(&self, stage: Stage) -> f64 {
        match stage {
            Stage::First => self.delta01,
            Stage::Second => self.delta02,
        }
    }

    /// Ω/Δ₀ for the stage.
    pub fn coupling_ratio(&self, stage: Stage) -> f64 {
        self.rabi(stage) / self.optical_detuning(stage)
    }

    /// Off-resonant regime: |Δ₀,μ| exceeds Ω_μ and the IB extent.
    pub fn off_resonant(&self, broadening: &BroadeningSpec) -> bool {
        let ib = broadening.extent(self.medium_length);
        [Stage::First, Stage::Second].iter().all(|&s| {
            let d = self.optical_detuning(s).abs();
            d > self.rabi(s) && d > ib
        })
    }

    /// Raman depth actually seen by the signal, after the depth reference.
    pub fn effective_depth(&self) -> f64 {
        match self.depth_reference {
            DepthReference::Absolute => self.optical_depth,
            DepthReference::Resonant => self.optical_depth * self.coupling_ratio(Stage::First).powi(2),
        }
    }

    /// β from the working optical depth: κ = πβ(Ω/Δ₀)²G₂(0)L.
    pub fn beta_from_depth(&self, broadening: &BroadeningSpec) -> Result<f64> {
        let c2 = self.coupling_ratio(Stage::First).powi(2);
        if c2 == 0.0 {
            return if self.effective_depth() == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::domain("nonzero optical depth needs Ω₁,₀ > 0"))
            };
        }
        let g0 = broadening.raman_peak_density(self.medium_length)?;
        Ok(self.effective_depth() / (PI * c2 * g0 * self.medium_length))
    }

    /// Copy with β recomputed from `optical_depth`.
    pub fn with_beta_from_depth(&self, broadening: &BroadeningSpec) -> Result<Self> {
        let mut p = self.clone();
        p.beta = p.beta_from_depth(broadening)?;
        Ok(p)
    }

    /// Copy with Ω₂ chosen so that Ω₂/Δ₀,₂ = √η′ Ω₁,₀/Δ₀,₁.
    pub fn with_str_coupling(&self) -> Self {
        let mut p = self.clone();
        p.omega2_rabi = (self.eta_prime.sqrt() * self.coupling_ratio(Stage::First) * self.delta02).abs();
        p
    }

    pub fn gamma_eff(&self) -> f64 {
        match self.gamma_eff_reading {
            GammaEffReading::Squared => self.gamma21 + self.gamma31 * self.coupling_ratio(Stage::First).powi(2),
            GammaEffReading::Literal => {
                self.gamma21 + self.gamma31 * self.omega1_rabi.powi(2) / self.delta01
            }
        }
    }
}

/// Δ̃_μ = Δ_μ − Ω_μ²/Δ₀,μ.
pub fn stark_shifted_detuning(params: &PhysicalParams, delta_raw: f64, stage: Stage) -> Result<f64> {
    let d0 = params.optical_detuning(stage);
    if d0 == 0.0 {
        return Err(Error::domain("zero optical detuning"));
    }
    Ok(delta_raw - params.rabi(stage).powi(2) / d0)
}

/// Inverse of [`stark_shifted_detuning`]: Δ_μ = Δ̃_μ + Ω_μ²/Δ₀,μ.
pub fn bare_detuning(params: &PhysicalParams, delta_shifted: f64, stage: Stage) -> Result<f64> {
    let d0 = params.optical_detuning(stage);
    if d0 == 0.0 {
        return Err(Error::domain("zero optical detuning"));
    }
    Ok(delta_shifted + params.rabi(stage).powi(2) / d0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum OpticalLine {
    None,
    Gaussian { width: f64 },
    Lorentzian { width: f64 },
}

/// Raman line G₂. Widths are rms for Gaussians and half width for Lorentzians.
/// The gradient line puts the Stark-corrected detuning at χ₁(Z − L/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RamanLine {
    Gaussian { width: f64 },
    Lorentzian { width: f64 },
    LongitudinalGradient { chi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    /// Gauss–Hermite for Gaussians, arctangent-mapped midpoints for Lorentzians.
    #[default]
    Gaussian,
    /// Equally spaced midpoint nodes over the truncated line (simulations).
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub raman_nodes: usize,
    pub optical_nodes: usize,
    /// Truncation radius in line widths; `None` picks 50 for Lorentzians and
    /// 4 for uniform Gaussian rules.
    pub truncation: Option<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            kind: QuadratureKind::Gaussian,
            raman_nodes: 64,
            optical_nodes: 1,
            truncation: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BroadeningSpec {
    pub optical_line: OpticalLine,
    pub raman_line: RamanLine,
    pub quadrature: QuadratureRule,
}

impl Default for BroadeningSpec {
    fn default() -> Self {
        BroadeningSpec {
            optical_line: OpticalLine::None,
            raman_line: RamanLine::Gaussian { width: 0.5 },
            quadrature: QuadratureRule::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineShape {
    Gaussian(f64),
    Lorentzian(f64),
}

impl LineShape {
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            LineShape::Gaussian(s) => (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * PI).sqrt()),
            LineShape::Lorentzian(w) => w / (PI * (x * x + w * w)),
        }
    }
}

impl BroadeningSpec {
    pub fn is_gradient(&self) -> bool {
        matches!(self.raman_line, RamanLine::LongitudinalGradient { .. })
    }

    /// G₂(0), using 1/(|χ|L) for the gradient line.
    pub fn raman_peak_density(&self, length: f64) -> Result<f64> {
        let g = match self.raman_line {
            RamanLine::Gaussian { width } if width > 0.0 => LineShape::Gaussian(width).density(0.0),
            RamanLine::Lorentzian { width } if width > 0.0 => LineShape::Lorentzian(width).density(0.0),
            RamanLine::LongitudinalGradient { chi } if chi != 0.0 => 1.0 / (chi.abs() * length),
            _ => return Err(Error::domain("Raman line needs a nonzero width or gradient")),
        };
        Ok(g)
    }

    /// Rough spectral half-extent of the inhomogeneous lines.
    pub fn extent(&self, length: f64) -> f64 {
        let r = match self.raman_line {
            RamanLine::Gaussian { width } => 3.0 * width,
            RamanLine::Lorentzian { width } => 3.0 * width,
            RamanLine::LongitudinalGradient { chi } => 0.5 * chi.abs() * length,
        };
        let o = match self.optical_line {
            OpticalLine::None => 0.0,
            OpticalLine::Gaussian { width } | OpticalLine::Lorentzian { width } => 3.0 * width,
        };
        r.max(o)
    }

    /// Stark-corrected Raman detuning of the gradient line at position z.
    pub fn gradient_detuning(&self, z: f64, length: f64) -> Option<f64> {
        match self.raman_line {
            RamanLine::LongitudinalGradient { chi } => Some(chi * (z - 0.5 * length)),
            _ => None,
        }
    }

    pub fn optical_width(&self) -> f64 {
        match self.optical_line {
            OpticalLine::None => 0.0,
            OpticalLine::Gaussian { width } | OpticalLine::Lorentzian { width } => width,
        }
    }
}

/// Nodes and weights of a normalized line shape.
pub fn line_quadrature(
    shape: LineShape,
    n: usize,
    kind: QuadratureKind,
    truncation: Option<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    let width = match shape {
        LineShape::Gaussian(w) | LineShape::Lorentzian(w) => w,
    };
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::domain(format!("invalid line width {width}")));
    }
    if n == 1 || width == 0.0 {
        return Ok((vec![0.0], vec![1.0]));
    }
    let (nodes, mut weights) = match (shape, kind) {
        (LineShape::Gaussian(s), QuadratureKind::Gaussian) => {
            let rule = GaussHermite::new(n).map_err(|e| Error::domain(e.to_string()))?;
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            // Symmetrize against eigen-solver round-off.
            for i in 0..n / 2 {
                let j = n - 1 - i;
                let x = 0.5 * (pairs[j].0 - pairs[i].0);
                let w = 0.5 * (pairs[j].1 + pairs[i].1);
                pairs[i] = (-x, w);
                pairs[j] = (x, w);
            }
            if n % 2 == 1 {
                pairs[n / 2].0 = 0.0;
            }
            pairs
                .into_iter()
                .map(|(x, w)| (std::f64::consts::SQRT_2 * s * x, w))
                .unzip::<f64, f64, Vec<f64>, Vec<f64>>()
        }
        (LineShape::Lorentzian(w), _) => {
            let r = truncation.unwrap_or(50.0);
            let tmax = r.atan();
            let h = 2.0 * tmax / n as f64;
            let nodes: Vec<f64> = (0..n)
                .map(|i| w * (-tmax + (i as f64 + 0.5) * h).tan())
                .collect();
            (nodes, vec![1.0; n])
        }
        (LineShape::Gaussian(s), QuadratureKind::Uniform) => {
            let r = truncation.unwrap_or(4.0);
            let h = 2.0 * r * s / n as f64;
            let nodes: Vec<f64> = (0..n).map(|i| -r * s + (i as f64 + 0.5) * h).collect();
            let weights = nodes.iter().map(|&x| shape.density(x)).collect();
            (nodes, weights)
        }
    };
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((nodes, weights))
}

/// Raman-line (Δ₁) quadrature of `spec`.
pub fn quadrature_nodes(spec: &BroadeningSpec, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let shape = match spec.raman_line {
        RamanLine::Gaussian { width } => LineShape::Gaussian(width),
        RamanLine::Lorentzian { width } => LineShape::Lorentzian(width),
        RamanLine::LongitudinalGradient { .. } => {
            return Err(Error::domain("no spectral quadrature for delta distribution"))
        }
    };
    line_quadrature(shape, n, spec.quadrature.kind, spec.quadrature.truncation)
}

/// Optical-line (δ₁) quadrature of `spec`; a single node at 0 when there is no line.
pub fn optical_quadrature_nodes(spec: &BroadeningSpec, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let shape = match spec.optical_line {
        OpticalLine::None => return Ok((vec![0.0], vec![1.0])),
        OpticalLine::Gaussian { width } => LineShape::Gaussian(width),
        OpticalLine::Lorentzian { width } => LineShape::Lorentzian(width),
    };
    line_quadrature(shape, n, spec.quadrature.kind, spec.quadrature.truncation)
}

/// Axes and atomic nodes of one simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationGrid {
    pub tau_samples: Vec<f64>,
    pub z_samples: Vec<f64>,
    pub nu_samples: Vec<f64>,
    /// δ₁ nodes and weights (optical line).
    pub delta1_nodes: Vec<f64>,
    pub delta1_weights: Vec<f64>,
    /// Stark-corrected Δ̃₁ nodes and weights (Raman line). Empty for a gradient line.
    pub raman_nodes: Vec<f64>,
    pub raman_weights: Vec<f64>,
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
        .collect()
}

/// Z samples on [0, L] with spacing growing geometrically by `ratio` from
/// the entrance face, where most of the absorption happens at high depth.
pub fn graded_z(length: f64, n: usize, ratio: f64) -> Vec<f64> {
    if n < 2 {
        return vec![0.0];
    }
    let cells = n - 1;
    if (ratio - 1.0).abs() < 1e-12 {
        return linspace(0.0, length, n);
    }
    let q = ratio.powf(1.0 / (cells as f64 - 1.0).max(1.0));
    let mut z = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut h = 1.0;
    z.push(0.0);
    for _ in 0..cells {
        acc += h;
        z.push(acc);
        h *= q;
    }
    let s = length / acc;
    z.iter_mut().for_each(|v| *v *= s);
    z[cells] = length;
    z
}

fn strictly_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Grid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl SimulationGrid {
    pub fn new(
        tau_samples: Vec<f64>,
        z_samples: Vec<f64>,
        broadening: &BroadeningSpec,
    ) -> Result<Self> {
        let q = broadening.quadrature;
        let (delta1_nodes, delta1_weights) = optical_quadrature_nodes(broadening, q.optical_nodes.max(1))?;
        let (raman_nodes, raman_weights) = if broadening.is_gradient() {
            (Vec::new(), Vec::new())
        } else {
            quadrature_nodes(broadening, q.raman_nodes.max(1))?
        };
        let g = SimulationGrid {
            tau_samples,
            z_samples,
            nu_samples: Vec::new(),
            delta1_nodes,
            delta1_weights,
            raman_nodes,
            raman_weights,
        };
        g.check_axes()?;
        Ok(g)
    }

    pub fn with_nu(mut self, nu: Vec<f64>) -> Result<Self> {
        self.nu_samples = nu;
        self.check_axes()?;
        Ok(self)
    }

    pub fn check_axes(&self) -> Result<()> {
        if self.tau_samples.len() < 2 {
            return Err(Error::Grid("need at least two time samples".into()));
        }
        if self.z_samples.len() < 2 {
            return Err(Error::Grid("need at least two z samples".into()));
        }
        strictly_increasing("tau_samples", &self.tau_samples)?;
        strictly_increasing("z_samples", &self.z_samples)?;
        strictly_increasing("nu_samples", &self.nu_samples)?;
        Ok(())
    }

    pub fn max_dt(&self) -> f64 {
        self.tau_samples.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Resolution check for the exponential integrator. Detuning phases are
    /// propagated exactly, so only the signal bandwidth and the control-field
    /// time dependence need resolving.
    pub fn validate_resolution(&self, signal_bandwidth: f64, control_rate: f64) -> Result<()> {
        let h = self.max_dt();
        if h * 4.0 * signal_bandwidth > 0.5 {
            return Err(Error::Grid(format!(
                "time step {h} does not resolve signal bandwidth {signal_bandwidth}"
            )));
        }
        if h * control_rate > 0.2 {
            return Err(Error::Grid(format!(
                "time step {h} does not resolve control switching rate {control_rate}"
            )));
        }
        if !self.nu_samples.is_empty() {
            let span = self.nu_samples[self.nu_samples.len() - 1] - self.nu_samples[0];
            if span < 4.0 * signal_bandwidth {
                return Err(Error::Grid(format!(
                    "frequency span {span} is below 4x the signal bandwidth {signal_bandwidth}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_grid_hits_both_ends() {
        let z = graded_z(2.0, 50, 20.0);
        assert_eq!(z[0], 0.0);
        assert_eq!(*z.last().unwrap(), 2.0);
        assert!(z[1] - z[0] < z[49] - z[48]);
    }

    #[test]
    fn resonant_depth_scales_with_coupling() {
        let p = PhysicalParams {
            delta01: 5.0,
            optical_depth: 200.0,
            depth_reference: DepthReference::Resonant,
            ..Default::default()
        };
        assert!((p.effective_depth() - 8.0).abs() < 1e-12);
    }
}
