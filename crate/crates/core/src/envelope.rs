//! Field envelopes, input pulse shapes and atomic coherence arrays.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Time,
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Complex slowly varying amplitude at one position, sampled on a time or
/// frequency axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEnvelope {
    pub samples: Vec<Complex64>,
    pub axis: Vec<f64>,
    pub domain: Domain,
    pub z: f64,
    pub direction: Direction,
}

/// Trapezoid rule on a possibly nonuniform axis.
pub fn trapezoid(axis: &[f64], values: impl Fn(usize) -> f64) -> f64 {
    axis.windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (values(i) + values(i + 1)))
        .sum()
}

impl FieldEnvelope {
    pub fn new(axis: Vec<f64>, samples: Vec<Complex64>, domain: Domain, z: f64, direction: Direction) -> Result<Self> {
        let e = FieldEnvelope {
            samples,
            axis,
            domain,
            z,
            direction,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis.len() != self.samples.len() {
            return Err(Error::Grid(format!(
                "envelope has {} samples on an axis of {}",
                self.samples.len(),
                self.axis.len()
            )));
        }
        if self.axis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("envelope axis must be strictly increasing".into()));
        }
        if self.samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::domain("envelope contains non-finite samples"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// ∫|E|² along the axis.
    pub fn energy(&self) -> f64 {
        trapezoid(&self.axis, |i| self.samples[i].norm_sqr())
    }

    /// Linear interpolation, zero outside the sampled range.
    pub fn interp(&self, x: f64) -> Complex64 {
        let a = &self.axis;
        if a.is_empty() || x < a[0] || x > a[a.len() - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let j = a.partition_point(|&v| v <= x).min(a.len() - 1).max(1);
        let (x0, x1) = (a[j - 1], a[j]);
        let t = (x - x0) / (x1 - x0);
        self.samples[j - 1] * (1.0 - t) + self.samples[j] * t
    }

    /// Cubic Hermite interpolation with centred-difference slopes; C¹, exact
    /// at the samples, zero outside the sampled range.
    pub fn interp_cubic(&self, x: f64) -> Complex64 {
        let a = &self.axis;
        let n = a.len();
        if n < 3 {
            return self.interp(x);
        }
        if x < a[0] || x > a[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let j = a.partition_point(|&v| v <= x).min(n - 1).max(1);
        let slope = |i: usize| {
            let (l, r) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (self.samples[r] - self.samples[l]) / (a[r] - a[l])
        };
        let (x0, x1) = (a[j - 1], a[j]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        self.samples[j - 1] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + slope(j - 1) * (h * (t3 - 2.0 * t2 + t))
            + self.samples[j] * (3.0 * t2 - 2.0 * t3)
            + slope(j) * (h * (t3 - t2))
    }

    /// Centroid of |E|².
    pub fn centroid(&self) -> f64 {
        let e = self.energy();
        trapezoid(&self.axis, |i| self.axis[i] * self.samples[i].norm_sqr()) / e
    }

    /// Full width at half maximum of |E|², with linear interpolation of the
    /// outermost half-maximum crossings.
    pub fn fwhm(&self) -> Option<f64> {
        let p: Vec<f64> = self.samples.iter().map(|s| s.norm_sqr()).collect();
        let pmax = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if pmax <= 0.0 {
            return None;
        }
        let half = 0.5 * pmax;
        let first = p.iter().position(|&v| v >= half)?;
        let last = p.len() - 1 - p.iter().rev().position(|&v| v >= half)?;
        if first == 0 || last == p.len() - 1 {
            return None;
        }
        let cross = |i0: usize, i1: usize| {
            let (a, b) = (p[i0], p[i1]);
            self.axis[i0] + (half - a) / (b - a) * (self.axis[i1] - self.axis[i0])
        };
        Some(cross(last, last + 1) - cross(first - 1, first))
    }

    /// Ẽ(ν) = ∫E(τ)e^{iντ}dτ by the trapezoid rule.
    pub fn spectrum(&self, nu: &[f64]) -> Result<FieldEnvelope> {
        if self.domain != Domain::Time {
            return Err(Error::domain("spectrum of a frequency-domain envelope"));
        }
        let samples = nu
            .iter()
            .map(|&v| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, w) in self.axis.windows(2).enumerate() {
                    let h = 0.5 * (w[1] - w[0]);
                    acc += h * (self.samples[i] * Complex64::from_polar(1.0, v * w[0])
                        + self.samples[i + 1] * Complex64::from_polar(1.0, v * w[1]));
                }
                acc
            })
            .collect();
        FieldEnvelope::new(nu.to_vec(), samples, Domain::Frequency, self.z, self.direction)
    }

    /// E(τ) = (1/2π)∫Ẽ(ν)e^{-iντ}dν by the trapezoid rule.
    pub fn to_time(&self, tau: &[f64]) -> Result<FieldEnvelope> {
        if self.domain != Domain::Frequency {
            return Err(Error::domain("inverse transform of a time-domain envelope"));
        }
        let samples = tau
            .iter()
            .map(|&t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, w) in self.axis.windows(2).enumerate() {
                    let h = 0.5 * (w[1] - w[0]);
                    acc += h * (self.samples[i] * Complex64::from_polar(1.0, -w[0] * t)
                        + self.samples[i + 1] * Complex64::from_polar(1.0, -w[1] * t));
                }
                acc / (2.0 * PI)
            })
            .collect();
        FieldEnvelope::new(tau.to_vec(), samples, Domain::Time, self.z, self.direction)
    }

    /// Spectral rms width from ∫|E'|²dτ / ∫|E|²dτ.
    pub fn rms_bandwidth(&self) -> f64 {
        let e = self.energy();
        if e <= 0.0 || self.len() < 2 {
            return 0.0;
        }
        let d: f64 = self
            .axis
            .windows(2)
            .zip(self.samples.windows(2))
            .map(|(t, s)| ((s[1] - s[0]) / (t[1] - t[0])).norm_sqr() * (t[1] - t[0]))
            .sum();
        (d / e).sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> FieldEnvelope {
        let mut e = self.clone();
        e.samples.iter_mut().for_each(|s| *s *= factor);
        e
    }

    /// Three columns: axis value, real part, imaginary part.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        let label = match self.domain {
            Domain::Time => "tau",
            Domain::Frequency => "nu",
        };
        writeln!(w, "{label},re,im").map_err(io)?;
        for (x, s) in self.axis.iter().zip(&self.samples) {
            writeln!(w, "{x:.16e},{:.16e},{:.16e}", s.re, s.im).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: &Path, z: f64, direction: Direction) -> Result<FieldEnvelope> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let r = BufReader::new(File::open(path).map_err(io)?);
        let mut lines = r.lines();
        let header = lines.next().transpose().map_err(io)?.unwrap_or_default();
        let domain = if header.starts_with("nu") {
            Domain::Frequency
        } else {
            Domain::Time
        };
        let (mut axis, mut samples) = (Vec::new(), Vec::new());
        for (n, line) in lines.enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), n + 2)))?;
            if v.len() != 3 {
                return Err(Error::Parse(format!("{}:{}: expected 3 columns", path.display(), n + 2)));
            }
            axis.push(v[0]);
            samples.push(Complex64::new(v[1], v[2]));
        }
        FieldEnvelope::new(axis, samples, domain, z, direction)
    }
}

/// Input signal shapes. `bandwidth` is the rms width of the spectral amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PulseShape {
    Gaussian { center: f64, bandwidth: f64 },
    /// Two Gaussian lobes `separation` apart, the later one scaled by `ratio`.
    TwoLobe {
        center: f64,
        bandwidth: f64,
        separation: f64,
        ratio: f64,
    },
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape::Gaussian {
            center: 0.0,
            bandwidth: 0.1,
        }
    }
}

impl PulseShape {
    pub fn amplitude(&self, t: f64) -> Complex64 {
        let g = |x: f64, b: f64| (-0.5 * (x * b).powi(2)).exp();
        match *self {
            PulseShape::Gaussian { center, bandwidth } => Complex64::new(g(t - center, bandwidth), 0.0),
            PulseShape::TwoLobe {
                center,
                bandwidth,
                separation,
                ratio,
            } => Complex64::new(
                g(t - center + 0.5 * separation, bandwidth) + ratio * g(t - center - 0.5 * separation, bandwidth),
                0.0,
            ),
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match *self {
            PulseShape::Gaussian { bandwidth, .. } | PulseShape::TwoLobe { bandwidth, .. } => bandwidth,
        }
    }

    /// Time after which the pulse is below e^{-12} of its peak.
    pub fn end_time(&self) -> f64 {
        match *self {
            PulseShape::Gaussian { center, bandwidth } => center + 5.0 / bandwidth,
            PulseShape::TwoLobe {
                center,
                bandwidth,
                separation,
                ..
            } => center + 0.5 * separation + 5.0 / bandwidth,
        }
    }

    pub fn start_time(&self) -> f64 {
        match *self {
            PulseShape::Gaussian { center, bandwidth } => center - 5.0 / bandwidth,
            PulseShape::TwoLobe {
                center,
                bandwidth,
                separation,
                ..
            } => center - 0.5 * separation - 5.0 / bandwidth,
        }
    }

    pub fn sample(&self, tau: &[f64], z: f64, direction: Direction) -> Result<FieldEnvelope> {
        FieldEnvelope::new(
            tau.to_vec(),
            tau.iter().map(|&t| self.amplitude(t)).collect(),
            Domain::Time,
            z,
            direction,
        )
    }
}

/// R₁₂ and R₁₃ on the (z × Δ₁-node × δ₁-node) grid, stored z-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicState {
    pub r12: Vec<Complex64>,
    pub r13: Vec<Complex64>,
    pub time: f64,
    pub nz: usize,
    pub n_raman: usize,
    pub n_optical: usize,
}

impl AtomicState {
    pub fn zeros(nz: usize, n_raman: usize, n_optical: usize, time: f64) -> Self {
        let n = nz * n_raman * n_optical;
        AtomicState {
            r12: vec![Complex64::new(0.0, 0.0); n],
            r13: vec![Complex64::new(0.0, 0.0); n],
            time,
            nz,
            n_raman,
            n_optical,
        }
    }

    pub fn nodes_per_slice(&self) -> usize {
        self.n_raman * self.n_optical
    }

    pub fn index(&self, iz: usize, ir: usize, io: usize) -> usize {
        (iz * self.n_raman + ir) * self.n_optical + io
    }

    /// Σ_nodes w (|R₁₂|² + |R₁₃|²) on one z slice.
    pub fn slice_population(&self, iz: usize, weights: &[f64]) -> f64 {
        let m = self.nodes_per_slice();
        (0..m)
            .map(|j| weights[j] * (self.r12[iz * m + j].norm_sqr() + self.r13[iz * m + j].norm_sqr()))
            .sum()
    }
}
