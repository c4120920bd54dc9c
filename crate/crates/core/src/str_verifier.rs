//! Scalable-time-reversal checks: the transformation itself, residuals of the
//! retrieval equations on transformed storage solutions, and waveform
//! comparisons of echoes against the scaled, reversed input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::efficiency::resolved_beta;
use crate::envelope::{trapezoid, Direction, FieldEnvelope, PulseShape};
use crate::mbsolver::{
    simulate, ControlSchedule, Model, ProblemStage, PropagationProblem, RecordSpec, Trajectory,
};
use crate::params::{linspace, BroadeningSpec, OpticalLine, PhysicalParams, RamanLine, SimulationGrid, Stage};
use crate::{Error, Result};

/// |∫E₁*(−η(τ − τ_e))E₂(τ)dτ|² / (∫|E₁(−η(τ−τ_e))|²dτ ∫|E₂|²dτ).
pub fn waveform_fidelity(input: &FieldEnvelope, echo: &FieldEnvelope, eta: f64, tau_echo: f64) -> Result<f64> {
    let e2 = echo.energy();
    if !(e2 > 0.0) {
        return Err(Error::domain("fidelity undefined for a zero-energy echo"));
    }
    let e1 = input.energy() / eta;
    if !(e1 > 0.0) {
        return Err(Error::domain("fidelity undefined for a zero-energy input"));
    }
    let image = |i: usize| input.interp_cubic(-eta * (echo.axis[i] - tau_echo));
    let re = trapezoid(&echo.axis, |i| (image(i).conj() * echo.samples[i]).re);
    let im = trapezoid(&echo.axis, |i| (image(i).conj() * echo.samples[i]).im);
    Ok(((re * re + im * im) / (e1 * e2)).min(1.0))
}

/// Echo time maximizing the fidelity: scan on the echo samples, then a
/// golden-section search between the neighbours of the best one.
/// Returns (τ_e, fidelity).
pub fn best_echo_time(input: &FieldEnvelope, echo: &FieldEnvelope, eta: f64) -> Result<(f64, f64)> {
    let n = echo.len();
    if n < 3 {
        return Err(Error::Grid("echo envelope too short".into()));
    }
    let f = |t: f64| waveform_fidelity(input, echo, eta, t);
    let peak = echo.samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..n {
        if echo.samples[i].norm() < 1e-3 * peak {
            continue;
        }
        let v = f(echo.axis[i])?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0.clamp(1, n - 2);
    let (mut a, mut b) = (echo.axis[i - 1], echo.axis[i + 1]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-6 * (echo.axis[i + 1] - echo.axis[i - 1]) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t)?;
    Ok(if v >= best.1 { (t, v) } else { (echo.axis[best.0], best.1) })
}

/// Gradient of the retrieval stage, χ₂ = −ηχ₁.
pub fn gem_gradient_flip(broadening: &BroadeningSpec, eta: f64) -> Result<BroadeningSpec> {
    match broadening.raman_line {
        RamanLine::LongitudinalGradient { chi } => Ok(BroadeningSpec {
            raman_line: RamanLine::LongitudinalGradient { chi: -eta * chi },
            ..*broadening
        }),
        _ => Err(Error::Unsupported("gradient flip needs a longitudinal-gradient line".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveformReport {
    pub fidelity: f64,
    pub echo_time: f64,
    pub fwhm_in: f64,
    pub fwhm_out: f64,
    pub fwhm_ratio: f64,
}

pub fn waveform_report(input: &FieldEnvelope, echo: &FieldEnvelope, eta: f64) -> Result<WaveformReport> {
    let (echo_time, fidelity) = best_echo_time(input, echo, eta)?;
    let fwhm_in = input.fwhm().ok_or_else(|| Error::domain("input FWHM undefined"))?;
    let fwhm_out = echo.fwhm().ok_or_else(|| Error::domain("echo FWHM undefined"))?;
    Ok(WaveformReport {
        fidelity,
        echo_time,
        fwhm_in,
        fwhm_out,
        fwhm_ratio: fwhm_in / fwhm_out,
    })
}

/// The three condition sets under which the retrieval equations are the
/// scaled, time-reversed storage equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrForm {
    /// Ω₂/Δ₀,₂ = √η Ω₁/Δ₀,₁, E₂ → −√η E₁.
    #[default]
    First,
    /// Ω₂/Δ₀,₂ = −√η Ω₁/Δ₀,₁, E₂ → √η E₁.
    Second,
    /// Ω₂/Δ₀,₂ = √η Ω₁/Δ₀,₁, E₂ → √η E₁, M₂ → −M₁.
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrTransform {
    pub eta: f64,
    pub form: StrForm,
}

impl StrTransform {
    pub fn new(eta: f64, form: StrForm) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::domain(format!("η must be positive, got {eta}")));
        }
        Ok(StrTransform { eta, form })
    }

    /// Plain CRIB reversal, η = 1.
    pub fn crib() -> Self {
        StrTransform {
            eta: 1.0,
            form: StrForm::First,
        }
    }

    pub fn inverse(&self) -> Self {
        StrTransform {
            eta: 1.0 / self.eta,
            form: self.form,
        }
    }

    pub fn field_scale(&self) -> f64 {
        match self.form {
            StrForm::First => -self.eta.sqrt(),
            StrForm::Second | StrForm::Third => self.eta.sqrt(),
        }
    }

    pub fn coherence_sign(&self) -> f64 {
        match self.form {
            StrForm::Third => -1.0,
            _ => 1.0,
        }
    }

    pub fn coupling_factor(&self) -> f64 {
        match self.form {
            StrForm::Second => -self.eta.sqrt(),
            _ => self.eta.sqrt(),
        }
    }

    /// Retrieval parameters meeting the coupling condition at the given
    /// |Δ₀,₂|; the second form needs Δ₀,₂ of opposite sign.
    pub fn retrieval_params(&self, storage: &PhysicalParams, delta02: f64) -> PhysicalParams {
        let ratio = self.coupling_factor() * storage.coupling_ratio(Stage::First);
        let d = delta02.abs() * ratio.signum();
        PhysicalParams {
            eta: self.eta,
            eta_prime: self.eta,
            delta02: d,
            omega2_rabi: ratio.abs() * delta02.abs(),
            ..storage.clone()
        }
    }
}

/// Field and Raman coherence in the variables with the background phase
/// βZ/(2Δ₀) removed, on a uniform (τ, Z) grid. They obey
/// ∂M/∂τ = −iΔ̃M + icE and ∂E/∂Z = s·i(β/2)c Σ w M, c = Ω/Δ₀, s = ±1 for
/// forward/backward propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct StrTrajectory {
    pub tau: Vec<f64>,
    pub z: Vec<f64>,
    /// [τ][z]
    pub field: Vec<Complex64>,
    /// [τ][z][node]
    pub coherence: Vec<Complex64>,
    /// Δ̃ of every node, one set per z slice.
    pub detuning: Vec<f64>,
    pub weights: Vec<f64>,
    pub nodes: usize,
    pub coupling: f64,
    pub beta: f64,
    pub direction: Direction,
}

impl StrTrajectory {
    fn field_at(&self, n: usize, iz: usize) -> Complex64 {
        self.field[n * self.z.len() + iz]
    }

    fn coherence_at(&self, n: usize, iz: usize, j: usize) -> Complex64 {
        self.coherence[(n * self.z.len() + iz) * self.nodes + j]
    }

    /// Reduced-model storage run (atoms recorded) in the background-free
    /// variables. Needs a uniform grid, no optical line and no decay.
    pub fn from_storage(problem: &PropagationProblem, trajectory: &Trajectory) -> Result<Self> {
        let p = &problem.params;
        let b = &problem.broadening;
        if b.optical_line != OpticalLine::None || p.gamma21 != 0.0 || p.gamma31 != 0.0 {
            return Err(Error::Unsupported(
                "STR residuals need a homogeneous optical line and no decay".into(),
            ));
        }
        if trajectory.r12.is_empty() {
            return Err(Error::config("record", "storage trajectory must record the atoms"));
        }
        for (name, v) in [("tau", &trajectory.tau), ("z", &trajectory.z)] {
            if !uniform(v) {
                return Err(Error::Grid(format!("STR residuals need a uniform {name} grid")));
            }
        }
        if problem.control.max_rate() != 0.0 {
            return Err(Error::Unsupported("STR residuals need a constant control field".into()));
        }
        let beta = resolved_beta(p, b)?;
        let d0 = p.delta01;
        let (nt, nz, m) = (trajectory.tau.len(), trajectory.z.len(), trajectory.nodes_per_slice);
        let phase: Vec<Complex64> = trajectory
            .z
            .iter()
            .map(|&z| Complex64::from_polar(1.0, -0.5 * beta * z / d0))
            .collect();
        let mut field = Vec::with_capacity(nt * nz);
        let mut coherence = Vec::with_capacity(nt * nz * m);
        for n in 0..nt {
            for iz in 0..nz {
                field.push(trajectory.field_at(n, iz) * phase[iz]);
                for j in 0..m {
                    coherence.push(trajectory.r12_at(n, iz, j) * phase[iz]);
                }
            }
        }
        let g = &problem.grid;
        let detuning = if b.is_gradient() {
            trajectory
                .z
                .iter()
                .map(|&z| b.gradient_detuning(z, p.medium_length).unwrap_or(0.0))
                .collect()
        } else {
            (0..m).map(|j| g.raman_nodes[j / g.delta1_nodes.len()]).collect()
        };
        Ok(StrTrajectory {
            tau: trajectory.tau.clone(),
            z: trajectory.z.clone(),
            field,
            coherence,
            detuning,
            weights: trajectory.weights.clone(),
            nodes: m,
            coupling: p.coupling_ratio(Stage::First),
            beta,
            direction: Direction::Forward,
        })
    }

    fn detuning_of(&self, iz: usize, j: usize) -> f64 {
        if self.detuning.len() == self.nodes {
            self.detuning[j]
        } else {
            self.detuning[iz * self.nodes + j]
        }
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

fn uniform(v: &[f64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
    v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
}

/// One STR condition, for deliberate-violation probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrCondition {
    /// Δ̃₂ = −ηΔ̃₁.
    Detuning,
    /// Z → −z: propagation reversed with the medium coordinate unscaled.
    Coordinate,
    /// τ₂ = −τ₁/η.
    Time,
    /// Ω₂/Δ₀,₂ = ±√η Ω₁/Δ₀,₁.
    Coupling,
    /// E₂ = ∓√η E₁.
    FieldScale,
}

impl StrCondition {
    pub const ALL: [StrCondition; 5] = [
        StrCondition::Detuning,
        StrCondition::Coordinate,
        StrCondition::Time,
        StrCondition::Coupling,
        StrCondition::FieldScale,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrCondition::Detuning => "detuning",
            StrCondition::Coordinate => "coordinate",
            StrCondition::Time => "time",
            StrCondition::Coupling => "coupling",
            StrCondition::FieldScale => "field_scale",
        }
    }
}

/// Map a storage trajectory to the retrieval trajectory the transform
/// predicts.
pub fn apply_str(solution: &StrTrajectory, transform: &StrTransform) -> Result<StrTrajectory> {
    apply_str_violating(solution, transform, None)
}

/// As [`apply_str`], with one condition broken by the factor `factor`.
pub fn apply_str_violating(
    solution: &StrTrajectory,
    transform: &StrTransform,
    violation: Option<(StrCondition, f64)>,
) -> Result<StrTrajectory> {
    let eta = transform.eta;
    let s = solution;
    let (nt, nz, m) = (s.tau.len(), s.z.len(), s.nodes);
    if s.field.len() != nt * nz || s.coherence.len() != nt * nz * m {
        return Err(Error::Grid("trajectory arrays do not match its axes".into()));
    }
    let f = |c: StrCondition| match violation {
        Some((v, x)) if v == c => x,
        _ => 1.0,
    };
    let time_scale = eta * f(StrCondition::Time);
    let tau: Vec<f64> = s.tau.iter().rev().map(|&t| -t / time_scale).collect();
    let zscale = f(StrCondition::Coordinate);
    // Slices of the new trajectory and where they read the old one.
    let z: Vec<f64> = s.z.iter().copied().filter(|&z| z * zscale <= s.z[nz - 1] + 1e-12).collect();
    if z.len() < 5 {
        return Err(Error::Grid("coordinate scaling leaves too few slices".into()));
    }
    let h = s.z[1] - s.z[0];
    let locate = |zz: f64| -> (usize, f64) {
        let x = ((zz * zscale - s.z[0]) / h).clamp(0.0, (nz - 1) as f64);
        let i = (x.floor() as usize).min(nz - 2);
        (i, x - i as f64)
    };
    let at = |get: &dyn Fn(usize) -> Complex64, i: usize, t: f64| -> Complex64 {
        if t == 0.0 {
            return get(i);
        }
        // Cubic Hermite in Z with centred slopes.
        let slope = |k: usize| {
            let (l, r) = (k.saturating_sub(1), (k + 1).min(nz - 1));
            (get(r) - get(l)) / (r - l) as f64
        };
        let (t2, t3) = (t * t, t * t * t);
        get(i) * (2.0 * t3 - 3.0 * t2 + 1.0)
            + slope(i) * (t3 - 2.0 * t2 + t)
            + get(i + 1) * (3.0 * t2 - 2.0 * t3)
            + slope(i + 1) * (t3 - t2)
    };
    let se = transform.field_scale() * f(StrCondition::FieldScale);
    let sm = transform.coherence_sign();
    let nz2 = z.len();
    let mut field = Vec::with_capacity(nt * nz2);
    let mut coherence = Vec::with_capacity(nt * nz2 * m);
    for n in (0..nt).rev() {
        for &zz in &z {
            let (i, t) = locate(zz);
            field.push(se * at(&|k| s.field_at(n, k), i, t));
            for j in 0..m {
                coherence.push(sm * at(&|k| s.coherence_at(n, k, j), i, t));
            }
        }
    }
    let dscale = -eta * f(StrCondition::Detuning);
    let detuning = if s.detuning.len() == m {
        s.detuning.iter().map(|d| dscale * d).collect()
    } else {
        z.iter()
            .flat_map(|&zz| {
                let (i, t) = locate(zz);
                (0..m).map(move |j| (i, t, j))
            })
            .map(|(i, t, j)| {
                let a = s.detuning[i * m + j];
                let b = s.detuning[(i + 1).min(nz - 1) * m + j];
                dscale * (a + t * (b - a))
            })
            .collect()
    };
    Ok(StrTrajectory {
        tau,
        z,
        field,
        coherence,
        detuning,
        weights: s.weights.clone(),
        nodes: m,
        coupling: transform.coupling_factor() * f(StrCondition::Coupling) * s.coupling,
        beta: s.beta,
        direction: match s.direction {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        },
    })
}

/// Fourth-order centred derivative along a uniform axis at interior index i.
fn d4(get: impl Fn(usize) -> Complex64, i: usize, h: f64) -> Complex64 {
    (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) / (12.0 * h)
}

/// Relative L2 residual of the light–atom equations evaluated on the
/// trajectory: for each equation ‖LHS − RHS‖/‖RHS‖, combined in quadrature.
/// Derivatives use fourth-order differences; two samples at each edge are
/// skipped.
pub fn str_residual(candidate: &StrTrajectory) -> f64 {
    let c = candidate;
    let (nt, nz, m) = (c.tau.len(), c.z.len(), c.nodes);
    if nt < 5 || nz < 5 {
        return f64::NAN;
    }
    let ht = c.tau[1] - c.tau[0];
    let hz = c.z[1] - c.z[0];
    let (mut rm, mut nm, mut re, mut ne) = (0.0, 0.0, 0.0, 0.0);
    let hb = c.sign() * 0.5 * c.beta * c.coupling;
    for n in 2..nt - 2 {
        for iz in 2..nz - 2 {
            let e = c.field_at(n, iz);
            for j in 0..m {
                let w = c.weights[j];
                let dm = d4(|k| c.coherence_at(k, iz, j), n, ht);
                let rhs = Complex64::new(0.0, -c.detuning_of(iz, j)) * c.coherence_at(n, iz, j)
                    + Complex64::new(0.0, c.coupling) * e;
                rm += w * (dm - rhs).norm_sqr();
                nm += w * rhs.norm_sqr().max(dm.norm_sqr());
            }
            let de = d4(|k| c.field_at(n, k), iz, hz);
            let sum: Complex64 = (0..m).map(|j| c.weights[j] * c.coherence_at(n, iz, j)).sum();
            let rhs = Complex64::new(0.0, hb) * sum;
            re += (de - rhs).norm_sqr();
            ne += rhs.norm_sqr().max(de.norm_sqr());
        }
    }
    let part = |r: f64, d: f64| if d > 0.0 { r / d } else { 0.0 };
    (part(rm, nm) + part(re, ne)).sqrt()
}

/// Residual of the exact transform and of each single-condition violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrCheck {
    pub eta: f64,
    pub form: StrForm,
    pub exact_residual: f64,
    /// (condition, residual, residual / exact residual).
    pub violations: Vec<(StrCondition, f64, f64)>,
}

pub const VIOLATION_FACTOR: f64 = 1.1;

pub fn str_check(storage: &StrTrajectory, transform: &StrTransform) -> Result<StrCheck> {
    let exact = str_residual(&apply_str(storage, transform)?);
    let mut violations = Vec::with_capacity(StrCondition::ALL.len());
    for c in StrCondition::ALL {
        let r = str_residual(&apply_str_violating(storage, transform, Some((c, VIOLATION_FACTOR)))?);
        violations.push((c, r, r / exact));
    }
    Ok(StrCheck {
        eta: transform.eta,
        form: transform.form,
        exact_residual: exact,
        violations,
    })
}

/// Reduced-model storage of `pulse` under a constant control on uniform
/// grids (step `dt`, `nz` slices), ready for [`str_check`].
pub fn storage_trajectory(
    params: &PhysicalParams,
    broadening: &BroadeningSpec,
    pulse: &PulseShape,
    dt: f64,
    nz: usize,
) -> Result<StrTrajectory> {
    if !(dt > 0.0) || nz < 5 {
        return Err(Error::config("dt/nz", "need dt > 0 and at least 5 z slices"));
    }
    let (t0, t1) = (pulse.start_time(), pulse.end_time());
    let n = ((t1 - t0) / dt).round() as usize + 1;
    let tau = linspace(t0, t0 + (n - 1) as f64 * dt, n);
    let grid = SimulationGrid::new(tau.clone(), linspace(0.0, params.medium_length, nz), broadening)?;
    let input = pulse.sample(&tau, 0.0, Direction::Forward)?;
    let mut prob = PropagationProblem::new(
        params.clone(),
        broadening.clone(),
        grid,
        input,
        ControlSchedule::constant(params.omega1_rabi),
        ProblemStage::Storage,
    );
    prob.record = RecordSpec { field: true, atoms: true };
    let out = simulate(&prob, Model::Reduced, None)?;
    let traj = out
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::domain("storage run returned no trajectory"))?;
    StrTrajectory::from_storage(&prob, traj)
}
