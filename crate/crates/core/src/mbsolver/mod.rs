//! Maxwell–Bloch integration of the storage and retrieval stages, in the full
//! three-level model and in the adiabatically eliminated Raman model.
//!
//! Each time step advances every atomic node with an exponential integrator
//! (detuning phases exact, field linear over the step), which leaves the new
//! polarization affine in the unknown field. The field equation along the
//! medium is then linear and is marched with an integrating factor, so the
//! large background phase β/(2Δ₀) per unit length costs nothing.

pub mod etd;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::resolved_beta;
use crate::envelope::{trapezoid, AtomicState, Direction, Domain, FieldEnvelope};
use crate::params::{BroadeningSpec, PhysicalParams, SimulationGrid, Stage};
use crate::{Error, Result};

use etd::{phi12, phi_matrix2};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Piece of the control-field schedule, in the frame time of the stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControlSegment {
    Constant { start: f64, end: f64, rabi: f64 },
    /// Ω e^{−rate(τ − start)}.
    ExpOff { start: f64, end: f64, rabi: f64, rate: f64 },
    /// Ω e^{rate(τ − end)}.
    ExpOn { start: f64, end: f64, rabi: f64, rate: f64 },
}

impl ControlSegment {
    fn span(&self) -> (f64, f64) {
        match *self {
            ControlSegment::Constant { start, end, .. }
            | ControlSegment::ExpOff { start, end, .. }
            | ControlSegment::ExpOn { start, end, .. } => (start, end),
        }
    }

    fn value(&self, t: f64) -> f64 {
        match *self {
            ControlSegment::Constant { rabi, .. } => rabi,
            ControlSegment::ExpOff { start, rabi, rate, .. } => rabi * (-rate * (t - start)).exp(),
            ControlSegment::ExpOn { end, rabi, rate, .. } => rabi * (rate * (t - end)).exp(),
        }
    }
}

/// Control Rabi frequency Ω(τ); zero outside every segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub segments: Vec<ControlSegment>,
}

impl ControlSchedule {
    pub fn constant(rabi: f64) -> Self {
        ControlSchedule {
            segments: vec![ControlSegment::Constant {
                start: f64::MIN,
                end: f64::MAX,
                rabi,
            }],
        }
    }

    pub fn rabi_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| {
                let (a, b) = s.span();
                t >= a && t < b
            })
            .map_or(0.0, |s| s.value(t))
    }

    pub fn max_rate(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match *s {
                ControlSegment::Constant { .. } => 0.0,
                ControlSegment::ExpOff { rate, .. } | ControlSegment::ExpOn { rate, .. } => rate,
            })
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let mut last = f64::NEG_INFINITY;
        for s in &self.segments {
            let (a, b) = s.span();
            if !(a < b) || a < last {
                return Err(Error::config("control", "segments must be ordered and non-overlapping"));
            }
            last = b;
            let (rabi, rate) = match *s {
                ControlSegment::Constant { rabi, .. } => (rabi, 1.0),
                ControlSegment::ExpOff { rabi, rate, .. } | ControlSegment::ExpOn { rabi, rate, .. } => (rabi, rate),
            };
            if !(rabi >= 0.0) || !(rate > 0.0) {
                return Err(Error::config("control", "Rabi frequencies must be nonnegative and rates positive"));
            }
        }
        Ok(())
    }
}

/// Retrieval-stage Raman detuning Δ̃₂ = scale·Δ̃₁ of every atomic node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningMap {
    pub scale: f64,
}

impl DetuningMap {
    /// Δ̃₂ = −ηΔ̃₁.
    pub fn str_flip(eta: f64) -> Self {
        DetuningMap { scale: -eta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum ProblemStage {
    Storage,
    Retrieval {
        map: Option<DetuningMap>,
        direction: Direction,
    },
}

impl ProblemStage {
    pub fn retrieval(eta: f64) -> Self {
        ProblemStage::Retrieval {
            map: Some(DetuningMap::str_flip(eta)),
            direction: Direction::Backward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    #[default]
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RecordSpec {
    pub field: bool,
    pub atoms: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationProblem {
    pub params: PhysicalParams,
    pub broadening: BroadeningSpec,
    pub grid: SimulationGrid,
    /// Field entering the medium (Z = 0 forward, Z = L backward).
    pub input_field: FieldEnvelope,
    pub control: ControlSchedule,
    pub stage: ProblemStage,
    pub record: RecordSpec,
    /// Expected bandwidth of fields generated inside the medium, for the
    /// resolution check when the input is empty.
    pub bandwidth_hint: f64,
}

impl PropagationProblem {
    pub fn new(
        params: PhysicalParams,
        broadening: BroadeningSpec,
        grid: SimulationGrid,
        input_field: FieldEnvelope,
        control: ControlSchedule,
        stage: ProblemStage,
    ) -> Self {
        PropagationProblem {
            params,
            broadening,
            grid,
            input_field,
            control,
            stage,
            record: RecordSpec::default(),
            bandwidth_hint: 0.0,
        }
    }

    fn stage_index(&self) -> Stage {
        match self.stage {
            ProblemStage::Storage => Stage::First,
            ProblemStage::Retrieval { .. } => Stage::Second,
        }
    }

    fn direction(&self) -> Direction {
        match self.stage {
            ProblemStage::Storage => Direction::Forward,
            ProblemStage::Retrieval { direction, .. } => direction,
        }
    }
}

/// Field and coherences sampled at every time step. Field is [τ][z]; the
/// coherences are [τ][z][node] and empty unless recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub tau: Vec<f64>,
    pub z: Vec<f64>,
    pub field: Vec<Complex64>,
    pub r12: Vec<Complex64>,
    pub r13: Vec<Complex64>,
    pub nodes_per_slice: usize,
    pub weights: Vec<f64>,
}

impl Trajectory {
    pub fn field_at(&self, n: usize, iz: usize) -> Complex64 {
        self.field[n * self.z.len() + iz]
    }

    pub fn r12_at(&self, n: usize, iz: usize, node: usize) -> Complex64 {
        self.r12[(n * self.z.len() + iz) * self.nodes_per_slice + node]
    }

    pub fn r13_at(&self, n: usize, iz: usize, node: usize) -> Complex64 {
        self.r13[(n * self.z.len() + iz) * self.nodes_per_slice + node]
    }

    /// Columns τ, Z, Re/Im of the field and of the weighted coherence sums
    /// ⟨R₁₂⟩ and ⟨R₁₃⟩ (zero when atoms were not recorded).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(w, "tau,z,field_re,field_im,r12_re,r12_im,r13_re,r13_im").map_err(io)?;
        let m = self.nodes_per_slice;
        let atoms = !self.r12.is_empty();
        for (n, t) in self.tau.iter().enumerate() {
            for (iz, z) in self.z.iter().enumerate() {
                let e = self.field_at(n, iz);
                let (mut a, mut b) = (ZERO, ZERO);
                if atoms {
                    for j in 0..m {
                        a += self.weights[j] * self.r12_at(n, iz, j);
                        b += self.weights[j] * self.r13_at(n, iz, j);
                    }
                }
                writeln!(
                    w,
                    "{t:.16e},{z:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    e.re, e.im, a.re, a.im, b.re, b.im
                )
                .map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationOutput {
    /// Atomic state at the last time sample.
    pub state: AtomicState,
    /// Field leaving the medium.
    pub output: FieldEnvelope,
    pub trajectory: Option<Trajectory>,
}

/// Quadrature weight of every node in one z slice, ordered (Raman, optical).
pub fn node_weights(grid: &SimulationGrid, broadening: &BroadeningSpec) -> Vec<f64> {
    let raman: &[f64] = if broadening.is_gradient() { &[1.0] } else { &grid.raman_weights };
    raman
        .iter()
        .flat_map(|&wr| grid.delta1_weights.iter().map(move |&wo| wr * wo))
        .collect()
}

/// Excitation held by the atoms, (β/2)∫dZ Σ w(|R₁₂|² + |R₁₃|²), in the units of
/// the field energy ∫|E|²dτ.
pub fn stored_energy(state: &AtomicState, weights: &[f64], z: &[f64], beta: f64) -> f64 {
    0.5 * beta * trapezoid(z, |iz| state.slice_population(iz, weights))
}

struct NodeTable {
    /// Number of distinct detuning sets: one, or one per z for a gradient.
    sets: usize,
    per_slice: usize,
    n_raman: usize,
    n_optical: usize,
    bare: Vec<f64>,
    delta: Vec<f64>,
    weight: Vec<f64>,
}

impl NodeTable {
    fn set_of(&self, iz: usize) -> usize {
        if self.sets == 1 {
            0
        } else {
            iz
        }
    }
}

fn node_table(problem: &PropagationProblem) -> Result<NodeTable> {
    let p = &problem.params;
    let b = &problem.broadening;
    let g = &problem.grid;
    let stage = problem.stage_index();
    let scale = match problem.stage {
        ProblemStage::Storage => 1.0,
        ProblemStage::Retrieval { map: Some(m), .. } => m.scale,
        ProblemStage::Retrieval { map: None, .. } => {
            return Err(Error::config(
                "detuning_map",
                "retrieval needs the inverted Raman broadening (Δ̃₂ = −ηΔ̃₁ or χ₂ = −ηχ₁)",
            ))
        }
    };
    let shift = p.rabi(stage).powi(2) / p.optical_detuning(stage);
    let n_optical = g.delta1_nodes.len();
    if n_optical == 0 || g.delta1_weights.len() != n_optical {
        return Err(Error::Grid("optical node table is empty or inconsistent".into()));
    }
    let (sets, stage1): (usize, Vec<Vec<f64>>) = if b.is_gradient() {
        if !g.raman_nodes.is_empty() {
            return Err(Error::Grid("gradient line admits no Raman quadrature nodes".into()));
        }
        let l = p.medium_length;
        (
            g.z_samples.len(),
            g.z_samples
                .iter()
                .map(|&z| vec![b.gradient_detuning(z, l).unwrap_or(0.0)])
                .collect(),
        )
    } else {
        if g.raman_nodes.is_empty() || g.raman_nodes.len() != g.raman_weights.len() {
            return Err(Error::Grid("Raman node table is empty or inconsistent".into()));
        }
        (1, vec![g.raman_nodes.clone()])
    };
    let n_raman = stage1[0].len();
    let per_slice = n_raman * n_optical;
    let mut bare = Vec::with_capacity(sets * per_slice);
    for set in &stage1 {
        for &d in set {
            for _ in 0..n_optical {
                bare.push(scale * d + shift);
            }
        }
    }
    let delta = (0..per_slice).map(|j| g.delta1_nodes[j % n_optical]).collect();
    Ok(NodeTable {
        sets,
        per_slice,
        n_raman,
        n_optical,
        bare,
        delta,
        weight: node_weights(g, b),
    })
}

#[derive(Clone, Copy)]
struct FullProp {
    e: [Complex64; 4],
    f1: [Complex64; 2],
    f2: [Complex64; 2],
}

#[derive(Clone, Copy)]
struct ReducedProp {
    e: Complex64,
    f1: Complex64,
    f2: Complex64,
    inv_d3: Complex64,
}

enum Props {
    Full(Vec<FullProp>),
    Reduced(Vec<ReducedProp>),
}

struct StepTables {
    props: Props,
    /// Σ w ∂R₁₃/∂E_{n+1} per detuning set.
    chi: Vec<Complex64>,
}

fn d3_of(p: &PhysicalParams, stage: Stage, delta: f64) -> Complex64 {
    Complex64::new(p.optical_detuning(stage) + delta, -p.gamma31)
}

fn step_tables(problem: &PropagationProblem, t: &NodeTable, model: Model, rabi: f64, h: f64) -> StepTables {
    let p = &problem.params;
    let stage = problem.stage_index();
    let m = t.per_slice;
    let mut chi = vec![ZERO; t.sets];
    match model {
        Model::Full => {
            let props: Vec<FullProp> = (0..t.sets * m)
                .into_par_iter()
                .map(|k| {
                    let d2 = Complex64::new(t.bare[k], -p.gamma21);
                    let d3 = d3_of(p, stage, t.delta[k % m]);
                    let a = [-I * d2 * h, I * rabi * h, I * rabi * h, -I * d3 * h];
                    let (e, f1, f2) = phi_matrix2(a, [ZERO, I * h]);
                    FullProp { e, f1, f2 }
                })
                .collect();
            for (s, c) in chi.iter_mut().enumerate() {
                *c = (0..m).map(|j| t.weight[j] * props[s * m + j].f2[1]).sum();
            }
            StepTables {
                props: Props::Full(props),
                chi,
            }
        }
        Model::Reduced => {
            let props: Vec<ReducedProp> = (0..t.sets * m)
                .map(|k| {
                    let d2 = Complex64::new(t.bare[k], -p.gamma21);
                    let inv_d3 = 1.0 / d3_of(p, stage, t.delta[k % m]);
                    let rate = -I * d2 + I * rabi * rabi * inv_d3;
                    let (e, p1, p2) = phi12(rate * h);
                    let g = I * rabi * inv_d3;
                    ReducedProp {
                        e,
                        f1: h * p1 * g,
                        f2: h * p2 * g,
                        inv_d3,
                    }
                })
                .collect();
            for (s, c) in chi.iter_mut().enumerate() {
                *c = (0..m)
                    .map(|j| {
                        let q = props[s * m + j];
                        t.weight[j] * (1.0 + rabi * q.f2) * q.inv_d3
                    })
                    .sum();
            }
            StepTables {
                props: Props::Reduced(props),
                chi,
            }
        }
    }
}

/// Order in which z slices are visited by the field.
fn march_order(nz: usize, dir: Direction) -> Vec<usize> {
    match dir {
        Direction::Forward => (0..nz).collect(),
        Direction::Backward => (0..nz).rev().collect(),
    }
}

/// Solve dE/dζ = i(β/2)(P_k(ζ) + χ(ζ)E) along the march order with an
/// integrating factor, P_k linear and χ at the interval midpoint.
fn march_field(
    z: &[f64],
    order: &[usize],
    entrance: Complex64,
    beta: f64,
    pk: &[Complex64],
    chi: impl Fn(usize) -> Complex64,
    out: &mut [Complex64],
) {
    let hb = I * (0.5 * beta);
    let mut e = entrance;
    out[order[0]] = e;
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dz = (z[b] - z[a]).abs();
        let lam = hb * 0.5 * (chi(a) + chi(b));
        let (ex, p1, p2) = phi12(lam * dz);
        let (ma, mb) = (hb * pk[a], hb * pk[b]);
        e = ex * e + dz * p1 * ma + dz * p2 * (mb - ma);
        out[b] = e;
    }
}

/// Generic driver used by the storage and retrieval entry points.
pub fn simulate(problem: &PropagationProblem, model: Model, initial: Option<&AtomicState>) -> Result<SimulationOutput> {
    let p = &problem.params;
    p.validate()?;
    problem.control.validate()?;
    problem.grid.check_axes()?;
    let bw = problem.input_field.rms_bandwidth().max(problem.bandwidth_hint);
    problem.grid.validate_resolution(bw, problem.control.max_rate())?;
    if model == Model::Reduced && !p.off_resonant(&problem.broadening) {
        return Err(Error::domain(
            "reduced model needs |Δ₀| above the Rabi frequency and the line widths; use the full model",
        ));
    }
    let table = node_table(problem)?;
    let beta = resolved_beta(p, &problem.broadening)?;
    let stage = problem.stage_index();
    let tau = &problem.grid.tau_samples;
    let z = &problem.grid.z_samples;
    let (nt, nz, m) = (tau.len(), z.len(), table.per_slice);
    let order = march_order(nz, problem.direction());

    let mut state = match initial {
        Some(s) => {
            if s.nz != nz || s.n_raman != table.n_raman || s.n_optical != table.n_optical {
                return Err(Error::Grid(format!(
                    "initial state shape ({}, {}, {}) does not match the grid ({nz}, {}, {})",
                    s.nz, s.n_raman, s.n_optical, table.n_raman, table.n_optical
                )));
            }
            let mut s = s.clone();
            s.time = tau[0];
            s
        }
        None => AtomicState::zeros(nz, table.n_raman, table.n_optical, tau[0]),
    };

    let entrance = |t: f64| problem.input_field.interp(t);
    let mut field = vec![ZERO; nz];
    let mut pk = vec![ZERO; nz];

    // Field already in the medium at the first sample.
    {
        let rabi = problem.control.rabi_at(tau[0]);
        let mut chi0 = vec![ZERO; nz];
        for iz in 0..nz {
            let base = iz * m;
            let mut acc = ZERO;
            let mut c = ZERO;
            for j in 0..m {
                let w = table.weight[j];
                match model {
                    Model::Full => acc += w * state.r13[base + j],
                    Model::Reduced => {
                        let inv = 1.0 / d3_of(p, stage, table.delta[j]);
                        acc += w * rabi * state.r12[base + j] * inv;
                        c += w * inv;
                    }
                }
            }
            pk[iz] = acc;
            chi0[iz] = c;
        }
        march_field(z, &order, entrance(tau[0]), beta, &pk, |iz| chi0[iz], &mut field);
        if model == Model::Reduced {
            for iz in 0..nz {
                for j in 0..m {
                    let inv = 1.0 / d3_of(p, stage, table.delta[j]);
                    state.r13[iz * m + j] = (field[iz] + rabi * state.r12[iz * m + j]) * inv;
                }
            }
        }
    }

    let exit = order[nz - 1];
    let mut out = Vec::with_capacity(nt);
    out.push(field[exit]);

    let mut traj = (problem.record.field || problem.record.atoms).then(|| Trajectory {
        tau: tau.clone(),
        z: z.clone(),
        field: Vec::with_capacity(nt * nz),
        r12: Vec::new(),
        r13: Vec::new(),
        nodes_per_slice: m,
        weights: table.weight.clone(),
    });
    let record = |traj: &mut Option<Trajectory>, field: &[Complex64], state: &AtomicState| {
        if let Some(tr) = traj.as_mut() {
            tr.field.extend_from_slice(field);
            if problem.record.atoms {
                tr.r12.extend_from_slice(&state.r12);
                tr.r13.extend_from_slice(&state.r13);
            }
        }
    };
    record(&mut traj, &field, &state);

    let mut cache: Option<((u64, u64), StepTables)> = None;
    let mut next = vec![ZERO; nz];
    for n in 0..nt - 1 {
        let h = tau[n + 1] - tau[n];
        let rabi = problem.control.rabi_at(tau[n] + 0.5 * h);
        let key = (h.to_bits(), rabi.to_bits());
        if cache.as_ref().map(|c| c.0) != Some(key) {
            cache = Some((key, step_tables(problem, &table, model, rabi, h)));
        }
        let tables = &cache.as_ref().unwrap().1;

        // Known part of the update; leaves the E_{n+1} term for later.
        let field_now = &field;
        match &tables.props {
            Props::Full(props) => {
                state
                    .r12
                    .par_chunks_mut(m)
                    .zip(state.r13.par_chunks_mut(m))
                    .zip(pk.par_iter_mut())
                    .enumerate()
                    .for_each(|(iz, ((r12, r13), pk))| {
                        let e0 = field_now[iz];
                        let props = &props[table.set_of(iz) * m..][..m];
                        let mut acc = ZERO;
                        for j in 0..m {
                            let q = &props[j];
                            let (x0, x1) = (r12[j], r13[j]);
                            let y0 = q.e[0] * x0 + q.e[1] * x1 + (q.f1[0] - q.f2[0]) * e0;
                            let y1 = q.e[2] * x0 + q.e[3] * x1 + (q.f1[1] - q.f2[1]) * e0;
                            r12[j] = y0;
                            r13[j] = y1;
                            acc += table.weight[j] * y1;
                        }
                        *pk = acc;
                    });
            }
            Props::Reduced(props) => {
                state
                    .r12
                    .par_chunks_mut(m)
                    .zip(pk.par_iter_mut())
                    .enumerate()
                    .for_each(|(iz, (r12, pk))| {
                        let e0 = field_now[iz];
                        let props = &props[table.set_of(iz) * m..][..m];
                        let mut acc = ZERO;
                        for j in 0..m {
                            let q = &props[j];
                            let y = q.e * r12[j] + (q.f1 - q.f2) * e0;
                            r12[j] = y;
                            acc += table.weight[j] * rabi * y * q.inv_d3;
                        }
                        *pk = acc;
                    });
            }
        }

        let chi = &tables.chi;
        march_field(
            z,
            &order,
            entrance(tau[n + 1]),
            beta,
            &pk,
            |iz| chi[table.set_of(iz)],
            &mut next,
        );

        let field_next = &next;
        match &tables.props {
            Props::Full(props) => {
                state
                    .r12
                    .par_chunks_mut(m)
                    .zip(state.r13.par_chunks_mut(m))
                    .enumerate()
                    .for_each(|(iz, (r12, r13))| {
                        let e1 = field_next[iz];
                        let props = &props[table.set_of(iz) * m..][..m];
                        for j in 0..m {
                            r12[j] += props[j].f2[0] * e1;
                            r13[j] += props[j].f2[1] * e1;
                        }
                    });
            }
            Props::Reduced(props) => {
                state
                    .r12
                    .par_chunks_mut(m)
                    .zip(state.r13.par_chunks_mut(m))
                    .enumerate()
                    .for_each(|(iz, (r12, r13))| {
                        let e1 = field_next[iz];
                        let props = &props[table.set_of(iz) * m..][..m];
                        for j in 0..m {
                            r12[j] += props[j].f2 * e1;
                            r13[j] = (e1 + rabi * r12[j]) * props[j].inv_d3;
                        }
                    });
            }
        }
        std::mem::swap(&mut field, &mut next);
        state.time = tau[n + 1];
        out.push(field[exit]);
        record(&mut traj, &field, &state);
    }

    let output = FieldEnvelope::new(tau.clone(), out, Domain::Time, z[exit], problem.direction())?;
    Ok(SimulationOutput {
        state,
        output,
        trajectory: traj,
    })
}

fn require_stage(problem: &PropagationProblem, storage: bool) -> Result<()> {
    let ok = matches!(problem.stage, ProblemStage::Storage) == storage;
    if ok {
        Ok(())
    } else {
        Err(Error::config(
            "stage",
            if storage {
                "storage simulation given a retrieval problem"
            } else {
                "retrieval simulation given a storage problem"
            },
        ))
    }
}

/// Full three-level storage from an empty medium.
pub fn simulate_storage_full(problem: &PropagationProblem) -> Result<SimulationOutput> {
    require_stage(problem, true)?;
    simulate(problem, Model::Full, None)
}

/// Raman storage with R₁₃ adiabatically eliminated.
pub fn simulate_storage_reduced(problem: &PropagationProblem) -> Result<SimulationOutput> {
    require_stage(problem, true)?;
    simulate(problem, Model::Reduced, None)
}

/// Full three-level retrieval from a prepared atomic state.
pub fn simulate_retrieval_full(problem: &PropagationProblem, initial: &AtomicState) -> Result<SimulationOutput> {
    require_stage(problem, false)?;
    simulate(problem, Model::Full, Some(initial))
}

pub fn simulate_retrieval_reduced(problem: &PropagationProblem, initial: &AtomicState) -> Result<SimulationOutput> {
    require_stage(problem, false)?;
    simulate(problem, Model::Reduced, Some(initial))
}
