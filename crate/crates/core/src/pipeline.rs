//! Storage, switch-off, storage interval, switch-on and retrieval chained into
//! one echo simulation.
//!
//! The control pulses are not integrated through their exponential tails.
//! Instead the coherences at the end of storage are carried over the switch-off
//! with the closed-form Bessel map, the remnant optical coherence is dropped,
//! and the long-lived coherence evolves freely until the switch-on map hands
//! the retrieval solver its initial state. Frame times: storage runs in
//! τ₁ = t − Z, backward retrieval in τ₂ = t + Z.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::efficiency::{echo_time, overall_efficiency, resolved_beta, EfficiencyBreakdown};
use crate::envelope::{AtomicState, Direction, Domain, FieldEnvelope, PulseShape};
use crate::mbsolver::{
    node_weights, simulate, stored_energy, ControlSchedule, DetuningMap, Model, ProblemStage, PropagationProblem,
};
use crate::params::{graded_z, linspace, BroadeningSpec, PhysicalParams, SimulationGrid, Stage};
use crate::str_verifier::{waveform_report, WaveformReport};
use crate::switching::{switch_off_at, switch_on_coefficients_for, CoherencePair, COMPLETE_SWITCH_SPAN};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub params: PhysicalParams,
    pub broadening: BroadeningSpec,
    pub pulse: PulseShape,
    /// Storage time step; retrieval uses dt/η when η > 1.
    pub dt: f64,
    pub nz: usize,
    /// Ratio of the last to the first Z cell.
    pub z_grading: f64,
    pub model: Model,
    pub direction: Direction,
    /// Wave-vector mismatch K imprinted as e^{iKZ} on the grating before a
    /// forward retrieval.
    pub phase_mismatch: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            params: PhysicalParams {
                tau_echo: 160.0,
                ..PhysicalParams::default()
            },
            broadening: BroadeningSpec::default(),
            pulse: PulseShape::default(),
            dt: 0.5,
            nz: 400,
            z_grading: 50.0,
            model: Model::Full,
            direction: Direction::Backward,
            phase_mismatch: 0.0,
        }
    }
}

/// Lab times of the stages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTiming {
    /// End of storage; the control starts switching off.
    pub tau0: f64,
    /// Switch-off complete (τ₁ frame).
    pub tau1_off: f64,
    /// Moment the Raman broadening is inverted.
    pub flip: f64,
    /// Switch-on complete (τ₂ frame).
    pub tau2_on: f64,
    pub retrieval_end: f64,
    /// τ_echo(η) measured from the input pulse centre.
    pub expected_echo: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub timing: PipelineTiming,
    pub input: FieldEnvelope,
    pub transmitted: FieldEnvelope,
    pub echo: FieldEnvelope,
    /// Atomic excitation at the end of storage over the input energy.
    pub stored_fraction: f64,
    pub simulated_efficiency: f64,
    pub analytic: EfficiencyBreakdown,
    /// None when the echo carries no energy.
    pub waveform: Option<WaveformReport>,
}

impl PipelineReport {
    /// (simulated − analytic)/analytic, None when the analytic value is zero.
    pub fn relative_deviation(&self) -> Option<f64> {
        (self.analytic.total > 0.0).then(|| (self.simulated_efficiency - self.analytic.total) / self.analytic.total)
    }
}

fn pulse_center(p: &PulseShape) -> f64 {
    0.5 * (p.start_time() + p.end_time())
}

pub fn pipeline_timing(cfg: &PipelineConfig) -> Result<PipelineTiming> {
    let p = &cfg.params;
    let c = pulse_center(&cfg.pulse);
    let eta = p.eta;
    let tau1_off = p.tau0 + COMPLETE_SWITCH_SPAN / p.k_off;
    let flip = c + 0.5 * p.tau_echo;
    let tau2_on = flip + p.medium_length + COMPLETE_SWITCH_SPAN / p.k_on;
    let expected_echo = c + echo_time(eta, p.tau_echo);
    let retrieval_end = flip + (flip - cfg.pulse.start_time()) / eta + p.medium_length + 2.0 / (eta * cfg.pulse.bandwidth());
    if p.tau0 < cfg.pulse.end_time() {
        return Err(Error::domain(format!(
            "storage ends at τ₀ = {} before the input pulse does ({})",
            p.tau0,
            cfg.pulse.end_time()
        )));
    }
    if flip < tau1_off + p.medium_length {
        return Err(Error::domain(format!(
            "broadening flip at {flip} precedes the end of switch-off over the medium ({}); increase tau_echo",
            tau1_off + p.medium_length
        )));
    }
    let leading = flip + (flip - cfg.pulse.end_time()) / eta;
    if leading < tau2_on {
        return Err(Error::domain(format!(
            "echo would start at {leading}, before the control is on at {tau2_on}; increase tau_echo"
        )));
    }
    Ok(PipelineTiming {
        tau0: p.tau0,
        tau1_off,
        flip,
        tau2_on,
        retrieval_end,
        expected_echo,
    })
}

fn axis(a: f64, b: f64, dt: f64) -> Vec<f64> {
    let n = ((b - a) / dt).ceil().max(1.0) as usize + 1;
    linspace(a, a + (n - 1) as f64 * dt, n)
}

/// Stark-corrected Raman detuning Δ̃₁ of node `ir` in slice `iz`.
fn raman_detuning(grid: &SimulationGrid, broadening: &BroadeningSpec, length: f64, iz: usize, ir: usize) -> f64 {
    if broadening.is_gradient() {
        broadening.gradient_detuning(grid.z_samples[iz], length).unwrap_or(0.0)
    } else {
        grid.raman_nodes[ir]
    }
}

/// Carry the storage state through switch-off, free evolution and switch-on.
pub fn hand_off(cfg: &PipelineConfig, grid: &SimulationGrid, timing: &PipelineTiming, stored: &AtomicState) -> Result<AtomicState> {
    let p = &cfg.params;
    let b = &cfg.broadening;
    let eta = p.eta;
    let shift1 = p.rabi(Stage::First).powi(2) / p.optical_detuning(Stage::First);
    let shift2 = p.rabi(Stage::Second).powi(2) / p.optical_detuning(Stage::Second);
    let sign = match cfg.direction {
        Direction::Backward => -1.0,
        Direction::Forward => 1.0,
    };
    // Background index of the off-resonant atoms, φ_μ = (β/2)Re⟨1/(Δ₀,μ + δ)⟩.
    // The retrieval control geometry is taken to phase-match the echo against
    // it; `phase_mismatch` adds a deliberate error on top for forward retrieval.
    let beta = resolved_beta(p, b)?;
    let background = |stage: Stage| -> f64 {
        let d0 = p.optical_detuning(stage);
        0.5 * beta
            * grid
                .delta1_nodes
                .iter()
                .zip(&grid.delta1_weights)
                .map(|(&d, &w)| w * (Complex64::new(1.0, 0.0) / Complex64::new(d0 + d, -p.gamma31)).re)
                .sum::<f64>()
    };
    let (phi1, phi2) = (background(Stage::First), background(Stage::Second));
    let k_match = match cfg.direction {
        Direction::Backward => -(phi1 + phi2),
        Direction::Forward => phi2 - phi1 + cfg.phase_mismatch,
    };
    let mut out = AtomicState::zeros(stored.nz, stored.n_raman, stored.n_optical, timing.tau2_on);
    let elapsed = COMPLETE_SWITCH_SPAN / p.k_off;
    for iz in 0..stored.nz {
        let z = grid.z_samples[iz];
        let grating = Complex64::from_polar(1.0, k_match * z);
        for ir in 0..stored.n_raman {
            let dt1 = raman_detuning(grid, b, p.medium_length, iz, ir);
            let bare1 = dt1 + shift1;
            let bare2 = -eta * dt1 + shift2;
            for io in 0..stored.n_optical {
                let delta = grid.delta1_nodes[io];
                let k = stored.index(iz, ir, io);
                let init = CoherencePair::new(stored.r12[k], stored.r13[k]);
                let off = switch_off_at(p, init, delta, bare1, elapsed)?;
                // Lab time at this slice: τ̃₁ + Z, then flip, then τ̃₂ ∓ Z.
                let s1 = timing.flip - (timing.tau1_off + z);
                let s2 = timing.tau2_on + sign * z - timing.flip;
                let free = off.r12
                    * (-(Complex64::new(p.gamma21, bare1)) * s1).exp()
                    * (-(Complex64::new(p.gamma21, bare2)) * s2).exp()
                    * grating;
                let d3_minus_d2 = Complex64::new(
                    p.optical_detuning(Stage::Second) + delta - bare2,
                    -(p.gamma31 - p.gamma21),
                );
                let c = switch_on_coefficients_for(p.rabi(Stage::Second), p.k_on, d3_minus_d2)?;
                out.r12[k] = c.c12 * free;
                out.r13[k] = I * c.c13 * free;
            }
        }
    }
    Ok(out)
}

/// Run the whole memory for one configuration.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    let p = &cfg.params;
    p.validate()?;
    if !(cfg.dt > 0.0) || cfg.nz < 2 || !(cfg.z_grading >= 1.0) {
        return Err(Error::config("dt/nz/z_grading", "need dt > 0, nz ≥ 2 and z_grading ≥ 1"));
    }
    let timing = pipeline_timing(cfg)?;
    let b = cfg.broadening;
    let eta = p.eta;
    let z = graded_z(p.medium_length, cfg.nz, cfg.z_grading);

    let tau1 = axis(cfg.pulse.start_time(), p.tau0, cfg.dt);
    let grid1 = SimulationGrid::new(tau1.clone(), z.clone(), &b)?;
    let input = cfg.pulse.sample(&tau1, 0.0, Direction::Forward)?;
    let storage = PropagationProblem::new(
        p.clone(),
        b,
        grid1.clone(),
        input.clone(),
        ControlSchedule::constant(p.rabi(Stage::First)),
        ProblemStage::Storage,
    );
    let stored = simulate(&storage, cfg.model, None)?;
    let beta = resolved_beta(p, &b)?;
    let weights = node_weights(&grid1, &b);
    let e_in = input.energy();
    let stored_fraction = stored_energy(&stored.state, &weights, &z, beta) / e_in;

    let initial = hand_off(cfg, &grid1, &timing, &stored.state)?;
    let dt2 = cfg.dt / eta.max(1.0);
    let tau2 = axis(timing.tau2_on, timing.retrieval_end, dt2);
    let grid2 = SimulationGrid { tau_samples: tau2.clone(), ..grid1 };
    let entrance_z = match cfg.direction {
        Direction::Backward => p.medium_length,
        Direction::Forward => 0.0,
    };
    let vacuum = FieldEnvelope::new(
        tau2.clone(),
        vec![Complex64::new(0.0, 0.0); tau2.len()],
        Domain::Time,
        entrance_z,
        cfg.direction,
    )?;
    let mut retrieval = PropagationProblem::new(
        p.clone(),
        b,
        grid2,
        vacuum,
        ControlSchedule::constant(p.rabi(Stage::Second)),
        ProblemStage::Retrieval {
            map: Some(DetuningMap::str_flip(eta)),
            direction: cfg.direction,
        },
    );
    retrieval.bandwidth_hint = eta * cfg.pulse.bandwidth();
    let echo = simulate(&retrieval, cfg.model, Some(&initial))?.output;

    let simulated_efficiency = echo.energy() / e_in;
    let analytic = overall_efficiency(p, &b)?;
    let waveform = if echo.energy() > 1e-12 * e_in {
        Some(waveform_report(&input, &echo, eta)?)
    } else {
        None
    };
    Ok(PipelineReport {
        timing,
        input,
        transmitted: stored.output,
        echo,
        stored_fraction,
        simulated_efficiency,
        analytic,
        waveform,
    })
}
