//! `key = value` run configuration. Every key has a default; files and
//! command-line overrides replace entries, and [`RunConfig::resolve`] turns
//! the table into typed parameters. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::envelope::{Direction, PulseShape};
use crate::mbsolver::Model;
use crate::params::{
    BroadeningSpec, DepthReference, GammaEffReading, OpticalLine, PhysicalParams, QuadratureKind, QuadratureRule,
    RamanLine,
};
use crate::pipeline::PipelineConfig;
use crate::{Error, Result};

/// (key, default, help) for every accepted key, in output order.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("omega1_rabi", "1", "storage control Rabi frequency Ω₁,₀ (unit)"),
    ("omega2_rabi", "1", "retrieval control Rabi frequency Ω₂,₀"),
    ("delta01", "20", "storage optical detuning Δ₀,₁"),
    ("delta02", "20", "retrieval optical detuning Δ₀,₂"),
    ("gamma21", "0", "Raman coherence decay γ₂₁"),
    ("gamma31", "0", "optical coherence decay γ₃₁"),
    ("beta", "0", "coupling β; 0 derives it from optical_depth"),
    ("eta", "1", "STR scaling factor η"),
    ("eta_prime", "auto", "coupling scale η′; auto follows eta"),
    ("k_off", "1", "switch-off rate k"),
    ("k_on", "20", "switch-on rate k_r"),
    ("tau0", "50", "end of storage τ₀"),
    ("tau_echo", "160", "echo time at η = 1, from the pulse centre"),
    ("tau_st", "0", "storage time τ_st"),
    ("medium_length", "1", "medium length L"),
    ("optical_depth", "5", "Raman optical depth κ̃"),
    ("depth_reference", "absolute", "absolute | resonant"),
    ("gamma_eff_reading", "squared", "squared | literal"),
    ("str_coupling", "false", "set Ω₂ so that Ω₂/Δ₀,₂ = √η′ Ω₁,₀/Δ₀,₁"),
    ("optical_line", "none", "none | gaussian | lorentzian"),
    ("optical_width", "0.1", "optical line width δ₁,in"),
    ("raman_line", "gaussian", "gaussian | lorentzian | gradient"),
    ("raman_width", "0.5", "Raman line width"),
    ("gradient_chi", "1", "gradient χ₁ for raman_line = gradient"),
    ("quadrature", "uniform", "gaussian | uniform"),
    ("raman_nodes", "160", "Raman quadrature nodes"),
    ("optical_nodes", "1", "optical quadrature nodes"),
    ("truncation", "auto", "line truncation in widths, or auto"),
    ("pulse_shape", "gaussian", "gaussian | two_lobe"),
    ("pulse_center", "0", "input pulse centre"),
    ("pulse_bandwidth", "0.1", "rms width of the spectral amplitude"),
    ("pulse_separation", "20", "two_lobe: lobe separation"),
    ("pulse_ratio", "0.5", "two_lobe: amplitude of the later lobe"),
    ("dt", "0.5", "storage time step"),
    ("nz", "400", "z samples"),
    ("z_grading", "50", "last/first z cell ratio"),
    ("model", "full", "full | reduced"),
    ("direction", "backward", "backward | forward retrieval"),
    ("phase_mismatch", "0", "grating mismatch K for forward retrieval"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: KEYS.iter().map(|&(k, v, _)| (k, v.to_string())).collect(),
        }
    }
}

fn canonical(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|&(k, _, _)| k).find(|&k| k == key)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = canonical(key).ok_or_else(|| {
            let known: Vec<&str> = KEYS.iter().map(|&(k, _, _)| k).collect();
            Error::config(key, format!("unknown key; expected one of {}", known.join(", ")))
        })?;
        self.values.insert(k, value.trim().to_string());
        Ok(())
    }

    pub fn set_f64(&mut self, key: &str, value: f64) -> Result<()> {
        self.set(key, &value.to_string())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut c = RunConfig::default();
        c.merge_text(&text)?;
        Ok(c)
    }

    /// `key=value` override from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v)
    }

    fn num(&self, key: &str) -> Result<f64> {
        let v = &self.values[key];
        v.parse::<f64>()
            .map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = &self.values[key];
        v.parse::<usize>()
            .map_err(|_| Error::config(key, format!("expected a nonnegative integer, got `{v}`")))
    }

    fn choice<'a>(&'a self, key: &str, options: &[&str]) -> Result<&'a str> {
        let v = self.values[key].as_str();
        if options.contains(&v) {
            Ok(v)
        } else {
            Err(Error::config(key, format!("expected one of {}, got `{v}`", options.join(" | "))))
        }
    }

    fn flag(&self, key: &str) -> Result<bool> {
        Ok(self.choice(key, &["true", "false"])? == "true")
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        let eta = self.num("eta")?;
        let eta_prime = match self.values["eta_prime"].as_str() {
            "auto" => eta,
            _ => self.num("eta_prime")?,
        };
        let p = PhysicalParams {
            omega1_rabi: self.num("omega1_rabi")?,
            omega2_rabi: self.num("omega2_rabi")?,
            delta01: self.num("delta01")?,
            delta02: self.num("delta02")?,
            gamma21: self.num("gamma21")?,
            gamma31: self.num("gamma31")?,
            beta: self.num("beta")?,
            eta,
            eta_prime,
            k_off: self.num("k_off")?,
            k_on: self.num("k_on")?,
            tau0: self.num("tau0")?,
            tau_echo: self.num("tau_echo")?,
            tau_st: self.num("tau_st")?,
            medium_length: self.num("medium_length")?,
            optical_depth: self.num("optical_depth")?,
            depth_reference: match self.choice("depth_reference", &["absolute", "resonant"])? {
                "absolute" => DepthReference::Absolute,
                _ => DepthReference::Resonant,
            },
            gamma_eff_reading: match self.choice("gamma_eff_reading", &["squared", "literal"])? {
                "squared" => GammaEffReading::Squared,
                _ => GammaEffReading::Literal,
            },
        };
        p.validate()?;
        Ok(if self.flag("str_coupling")? {
            p.with_str_coupling()
        } else {
            p
        })
    }

    pub fn broadening(&self) -> Result<BroadeningSpec> {
        let optical_line = match self.choice("optical_line", &["none", "gaussian", "lorentzian"])? {
            "none" => OpticalLine::None,
            "gaussian" => OpticalLine::Gaussian {
                width: self.num("optical_width")?,
            },
            _ => OpticalLine::Lorentzian {
                width: self.num("optical_width")?,
            },
        };
        let raman_line = match self.choice("raman_line", &["gaussian", "lorentzian", "gradient"])? {
            "gaussian" => RamanLine::Gaussian {
                width: self.num("raman_width")?,
            },
            "lorentzian" => RamanLine::Lorentzian {
                width: self.num("raman_width")?,
            },
            _ => RamanLine::LongitudinalGradient {
                chi: self.num("gradient_chi")?,
            },
        };
        let kind = match self.choice("quadrature", &["gaussian", "uniform"])? {
            "gaussian" => QuadratureKind::Gaussian,
            _ => QuadratureKind::Uniform,
        };
        let truncation = match self.values["truncation"].as_str() {
            "auto" => None,
            _ => Some(self.num("truncation")?),
        };
        for (k, w) in [("optical_width", self.num("optical_width")?), ("raman_width", self.num("raman_width")?)] {
            if !(w > 0.0) {
                return Err(Error::config(k, "line widths must be positive"));
            }
        }
        Ok(BroadeningSpec {
            optical_line,
            raman_line,
            quadrature: QuadratureRule {
                kind,
                raman_nodes: self.count("raman_nodes")?,
                optical_nodes: self.count("optical_nodes")?,
                truncation,
            },
        })
    }

    pub fn pulse(&self) -> Result<PulseShape> {
        let center = self.num("pulse_center")?;
        let bandwidth = self.num("pulse_bandwidth")?;
        if !(bandwidth > 0.0) {
            return Err(Error::config("pulse_bandwidth", "must be positive"));
        }
        Ok(match self.choice("pulse_shape", &["gaussian", "two_lobe"])? {
            "gaussian" => PulseShape::Gaussian { center, bandwidth },
            _ => PulseShape::TwoLobe {
                center,
                bandwidth,
                separation: self.num("pulse_separation")?,
                ratio: self.num("pulse_ratio")?,
            },
        })
    }

    pub fn resolve(&self) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            params: self.physical_params()?,
            broadening: self.broadening()?,
            pulse: self.pulse()?,
            dt: self.num("dt")?,
            nz: self.count("nz")?,
            z_grading: self.num("z_grading")?,
            model: match self.choice("model", &["full", "reduced"])? {
                "full" => Model::Full,
                _ => Model::Reduced,
            },
            direction: match self.choice("direction", &["backward", "forward"])? {
                "backward" => Direction::Backward,
                _ => Direction::Forward,
            },
            phase_mismatch: self.num("phase_mismatch")?,
        })
    }

    /// Every key with its current value, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&(k, _, _)| (k, self.values[k].clone())).collect()
    }

    /// [`RunConfig::entries`] with derived values filled in: `eta_prime = auto`
    /// becomes the number, and Ω₂ follows `str_coupling`. Entries that do not
    /// resolve are echoed as written.
    pub fn resolved_entries(&self) -> Vec<(&'static str, String)> {
        let p = self.physical_params().ok();
        self.entries()
            .into_iter()
            .map(|(k, v)| match (k, &p) {
                ("eta_prime", Some(p)) => (k, p.eta_prime.to_string()),
                ("omega2_rabi", Some(p)) => (k, p.omega2_rabi.to_string()),
                _ => (k, v),
            })
            .collect()
    }
}
