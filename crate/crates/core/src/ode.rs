//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.
//!
//! Used as an oracle (switch-off/on dynamics) and as the large-argument Bessel
//! backend. The controller is the standard one from Hairer, Nørsett & Wanner with
//! FSAL reuse of the last stage.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error(
        "step size underflow at t = {t} (h = {h:e}); problem is too stiff for the explicit \
         integrator ({} accepted, {} rejected steps)", stats.accepted, stats.rejected
    )]
    StepSizeUnderflow { t: f64, h: f64, stats: OdeStats },
    #[error("exceeded {max_steps} steps at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stateful stepper: keeps the last accepted step size between calls so a
/// trajectory can be sampled at many output times cheaply.
pub struct Dopri5 {
    opts: Dopri5Options,
    h: Option<f64>,
    stats: OdeStats,
}

impl Dopri5 {
    pub fn new(opts: Dopri5Options) -> Self {
        Dopri5 {
            opts,
            h: opts.h_init,
            stats: OdeStats::default(),
        }
    }

    pub fn stats(&self) -> OdeStats {
        self.stats
    }

    fn err_norm(&self, y: &[Complex64], y_new: &[Complex64], err: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..y.len() {
            let sc = self.opts.atol + self.opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = err[i].norm() / sc;
            acc += r * r;
        }
        (acc / y.len() as f64).sqrt()
    }

    /// Advance `y` from `t` to `t_end` (either direction).
    pub fn integrate<F>(&mut self, mut f: F, t: f64, y: &mut [Complex64], t_end: f64) -> Result<(), OdeError>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let n = y.len();
        if t == t_end {
            return Ok(());
        }
        let dir = (t_end - t).signum();
        let mut k1 = vec![Complex64::default(); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut k5 = k1.clone();
        let mut k6 = k1.clone();
        let mut k7 = k1.clone();
        let mut tmp = k1.clone();
        let mut y_new = k1.clone();
        let mut err = k1.clone();

        let mut t = t;
        f(t, y, &mut k1);
        self.stats.evaluations += 1;

        let span = (t_end - t).abs();
        let mut h = match self.h {
            Some(h) => h.abs().min(span),
            None => {
                let d0 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let d1 = k1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
                h0.min(span)
            }
        }
        .min(self.opts.h_max);

        let mut steps = 0usize;
        loop {
            let remaining = (t_end - t).abs();
            if remaining <= 1e-15 * t.abs().max(1.0) {
                break;
            }
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;

            for i in 0..n {
                tmp[i] = y[i] + hs * (A21 * k1[i]);
            }
            f(t + C2 * hs, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * hs, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * hs, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * hs, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + hs, &tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            f(t + hs, &y_new, &mut k7);
            self.stats.evaluations += 6;
            for i in 0..n {
                err[i] = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }

            let en = self.err_norm(y, &y_new, &err);
            if !en.is_finite() {
                return Err(OdeError::NonFinite { t });
            }
            if en <= 1.0 {
                t = if last { t_end } else { t + hs };
                y.copy_from_slice(&y_new);
                std::mem::swap(&mut k1, &mut k7);
                self.stats.accepted += 1;
                let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                // Keep the step size of the last full step, not the clipped one.
                if !last || h * fac < h {
                    h = (h * fac).min(self.opts.h_max);
                }
            } else {
                self.stats.rejected += 1;
                h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(OdeError::StepSizeUnderflow {
                        t,
                        h,
                        stats: self.stats,
                    });
                }
            }
            steps += 1;
            if steps > self.opts.max_steps {
                return Err(OdeError::MaxSteps {
                    t,
                    max_steps: self.opts.max_steps,
                });
            }
        }
        self.h = Some(h);
        Ok(())
    }
}
