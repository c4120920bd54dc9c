//! Parameter sweeps over the analytic observables (and the simulated
//! fidelity), with CSV/JSON output and the bundled figure grids.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::efficiency::{dephasing_factor, overall_efficiency};
use crate::pipeline::run_pipeline;
use crate::switching::{remnant_r13, switch_on_efficiency, transfer_efficiency};
use crate::{Error, Result};

pub const MAX_AXES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    Range { min: f64, max: f64, count: usize, spacing: Spacing },
    List(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: AxisValues,
}

impl SweepAxis {
    pub fn range(name: &str, min: f64, max: f64, count: usize, spacing: Spacing) -> Self {
        SweepAxis {
            name: name.to_string(),
            values: AxisValues::Range { min, max, count, spacing },
        }
    }

    pub fn list(name: &str, values: &[f64]) -> Self {
        SweepAxis {
            name: name.to_string(),
            values: AxisValues::List(values.to_vec()),
        }
    }

    /// Grid points; endpoints are exact.
    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::List(v) => v.clone(),
            AxisValues::Range { min, max, count, spacing } => {
                let n = *count;
                (0..n)
                    .map(|i| {
                        if i == 0 {
                            return *min;
                        }
                        if i == n - 1 {
                            return *max;
                        }
                        let t = i as f64 / (n - 1) as f64;
                        match spacing {
                            Spacing::Linear => min + t * (max - min),
                            Spacing::Log => (min.ln() + t * (max.ln() - min.ln())).exp(),
                        }
                    })
                    .collect()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let key = format!("axis {}", self.name);
        match &self.values {
            AxisValues::List(v) => {
                // An empty list gives an empty sweep.
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::config(key, "values must be finite"));
                }
            }
            AxisValues::Range { min, max, count, spacing } => {
                if *count < 2 {
                    return Err(Error::config(key, "count must be at least 2"));
                }
                if !min.is_finite() || !max.is_finite() {
                    return Err(Error::config(key, "range must be finite"));
                }
                if *spacing == Spacing::Log && !(*min > 0.0 && *max > 0.0) {
                    return Err(Error::config(key, "log axis needs positive bounds"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    RemnantR13,
    EpsT,
    EpsR,
    GammaFactor,
    OverallEff,
    Fidelity,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::RemnantR13 => "remnant_r13",
            Observable::EpsT => "eps_t",
            Observable::EpsR => "eps_r",
            Observable::GammaFactor => "gamma_factor",
            Observable::OverallEff => "overall_eff",
            Observable::Fidelity => "fidelity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            Observable::RemnantR13,
            Observable::EpsT,
            Observable::EpsR,
            Observable::GammaFactor,
            Observable::OverallEff,
            Observable::Fidelity,
        ]
        .into_iter()
        .find(|o| o.name() == s)
        .ok_or_else(|| Error::config("observable", format!("unknown observable `{s}`")))
    }

    fn eval(&self, cfg: &RunConfig) -> Result<f64> {
        match self {
            Observable::Fidelity => {
                let r = run_pipeline(&cfg.resolve()?)?;
                Ok(r.waveform.map_or(0.0, |w| w.fidelity))
            }
            _ => {
                let p = cfg.physical_params()?;
                let b = cfg.broadening()?;
                match self {
                    Observable::RemnantR13 => remnant_r13(&p, 0.0, 0.0),
                    Observable::EpsT => transfer_efficiency(&p, 0.0, 0.0),
                    Observable::EpsR => switch_on_efficiency(&p),
                    Observable::GammaFactor => dephasing_factor(&p, b.optical_line),
                    _ => Ok(overall_efficiency(&p, &b)?.total),
                }
            }
        }
    }
}

/// Extra column holding `numerator / denominator` of two resolved keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioColumn {
    pub name: String,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    pub observables: Vec<Observable>,
    /// Base configuration with the fixed overrides applied.
    pub base: RunConfig,
    /// (target, source): after the axis values are set, target takes the
    /// value of source.
    pub ties: Vec<(String, String)>,
    pub ratios: Vec<RatioColumn>,
}

impl SweepSpec {
    pub fn new(axes: Vec<SweepAxis>, observables: Vec<Observable>, base: RunConfig) -> Self {
        SweepSpec {
            axes,
            observables,
            base,
            ties: Vec::new(),
            ratios: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > MAX_AXES {
            return Err(Error::config("axes", format!("at most {MAX_AXES} axes")));
        }
        if self.observables.is_empty() {
            return Err(Error::config("observable", "need at least one observable"));
        }
        for a in &self.axes {
            a.validate()?;
            let mut probe = self.base.clone();
            probe.set(&a.name, "0")?;
        }
        for (t, s) in &self.ties {
            let mut probe = self.base.clone();
            probe.set(t, "0")?;
            probe.set(s, "0")?;
        }
        Ok(())
    }

    /// Axis coordinates of every row, row-major (last axis fastest).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let pts: Vec<Vec<f64>> = self.axes.iter().map(SweepAxis::points).collect();
        let mut rows = vec![Vec::new()];
        for p in &pts {
            rows = rows
                .into_iter()
                .flat_map(|r| {
                    p.iter().map(move |&v| {
                        let mut r = r.clone();
                        r.push(v);
                        r
                    })
                })
                .collect();
        }
        rows
    }

    fn point_config(&self, coords: &[f64]) -> Result<RunConfig> {
        let mut c = self.base.clone();
        for (a, &v) in self.axes.iter().zip(coords) {
            c.set_f64(&a.name, v)?;
        }
        for (t, s) in &self.ties {
            let v = c.get(s).unwrap_or_default().to_string();
            c.set(t, &v)?;
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Resolved parameter record and tool version.
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    /// Nonfinite values are stored as NaN; the row's error says why.
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<Option<String>>,
}

fn ratio_value(c: &RunConfig, r: &RatioColumn) -> f64 {
    let get = |k: &str| c.get(k).and_then(|v| v.parse::<f64>().ok()).unwrap_or(f64::NAN);
    get(&r.numerator) / get(&r.denominator)
}

pub fn header_record(base: &RunConfig) -> Vec<(String, String)> {
    let mut h = vec![("tool".to_string(), format!("raman-echo {}", env!("CARGO_PKG_VERSION")))];
    h.extend(base.resolved_entries().into_iter().map(|(k, v)| (k.to_string(), v)));
    h
}

/// Evaluate every grid point. Points run in parallel on the current rayon
/// pool; rows come back in grid order whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let evaluated: Vec<(Vec<f64>, Option<String>)> = grid
        .par_iter()
        .map(|coords| {
            let mut row = coords.clone();
            let cfg = match spec.point_config(coords) {
                Ok(c) => c,
                Err(e) => {
                    row.extend(std::iter::repeat(f64::NAN).take(spec.ratios.len() + spec.observables.len()));
                    return (row, Some(e.to_string()));
                }
            };
            row.extend(spec.ratios.iter().map(|r| ratio_value(&cfg, r)));
            let mut err = None;
            for o in &spec.observables {
                match o.eval(&cfg) {
                    Ok(v) if v.is_finite() => row.push(v),
                    Ok(v) => {
                        row.push(f64::NAN);
                        err.get_or_insert_with(|| format!("{}: nonfinite value {v}", o.name()));
                    }
                    Err(e) => {
                        row.push(f64::NAN);
                        err.get_or_insert_with(|| format!("{}: {e}", o.name()));
                    }
                }
            }
            (row, err)
        })
        .collect();
    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    columns.extend(spec.ratios.iter().map(|r| r.name.clone()));
    columns.extend(spec.observables.iter().map(|o| o.name().to_string()));
    let (rows, errors) = evaluated.into_iter().unzip();
    Ok(SweepResult {
        header: header_record(&spec.base),
        columns,
        rows,
        errors,
    })
}

/// Same as [`run_sweep`] on a dedicated pool of `jobs` threads.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    pool.install(|| run_sweep(spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::config("format", format!("expected csv | json, got `{s}`"))),
        }
    }
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{},error", self.columns.join(","));
        for (row, err) in self.rows.iter().zip(&self.errors) {
            for v in row {
                let _ = write!(s, "{v:.16e},");
            }
            let _ = writeln!(s, "{}", err.as_deref().unwrap_or("").replace([',', '\n'], ";"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            header: serde_json::Map<String, serde_json::Value>,
            columns: &'a [String],
            rows: Vec<Vec<Option<f64>>>,
            errors: &'a [Option<String>],
        }
        let doc = Doc {
            header: self
                .header
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
                .collect(),
            errors: &self.errors,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("sweep result serializes");
        s.push('\n');
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut header = Vec::new();
        let mut lines = text.lines();
        let mut columns = None;
        for line in lines.by_ref() {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta
                    .split_once(" = ")
                    .ok_or_else(|| Error::Parse(format!("bad metadata line `{line}`")))?;
                header.push((k.to_string(), v.to_string()));
            } else {
                columns = Some(line);
                break;
            }
        }
        let cols: Vec<String> = columns
            .ok_or_else(|| Error::Parse("missing header row".into()))?
            .split(',')
            .map(str::to_string)
            .collect();
        if cols.last().map(String::as_str) != Some("error") {
            return Err(Error::Parse("last column must be `error`".into()));
        }
        let n = cols.len() - 1;
        let mut rows = Vec::new();
        let mut errors = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.splitn(n + 1, ',').collect();
            if f.len() != n + 1 {
                return Err(Error::Parse(format!("row has {} fields, expected {}", f.len(), n + 1)));
            }
            rows.push(
                f[..n]
                    .iter()
                    .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{v}`"))))
                    .collect::<Result<Vec<f64>>>()?,
            );
            errors.push((!f[n].is_empty()).then(|| f[n].to_string()));
        }
        Ok(SweepResult {
            header,
            columns: cols[..n].to_vec(),
            rows,
            errors,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            header: serde_json::Map<String, serde_json::Value>,
            columns: Vec<String>,
            rows: Vec<Vec<Option<f64>>>,
            errors: Vec<Option<String>>,
        }
        let d: Doc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(SweepResult {
            header: d
                .header
                .into_iter()
                .map(|(k, v)| (k, v.as_str().map_or_else(|| v.to_string(), str::to_string)))
                .collect(),
            columns: d.columns,
            rows: d
                .rows
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
                .collect(),
            errors: d.errors,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn emit(result: &SweepResult, format: Format, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let text = match format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    };
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)
}

/// Bundled grids 2 to 7: axes, ties and fixed values for each standard map.
pub fn figure_spec(n: u32) -> Result<SweepSpec> {
    let mut base = RunConfig::default();
    let detunings = [3.0, 5.0, 10.0, 20.0];
    let k_over_delta = RatioColumn {
        name: "k_over_delta01".into(),
        numerator: "k_off".into(),
        denominator: "delta01".into(),
    };
    let spec = match n {
        2 | 3 => {
            let obs = if n == 2 { Observable::RemnantR13 } else { Observable::EpsT };
            let mut s = SweepSpec::new(
                vec![
                    SweepAxis::list("delta01", &detunings),
                    SweepAxis::range("k_off", 0.05, 50.0, 61, Spacing::Log),
                ],
                vec![obs],
                base,
            );
            s.ratios.push(k_over_delta);
            s
        }
        4 => {
            let mut s = SweepSpec::new(
                vec![
                    SweepAxis::range("delta02", 2.0, 40.0, 39, Spacing::Linear),
                    SweepAxis::range("k_on", 0.1, 50.0, 41, Spacing::Log),
                ],
                vec![Observable::EpsR],
                base,
            );
            s.ties.push(("delta01".into(), "delta02".into()));
            s
        }
        5 => {
            for (k, v) in [("delta01", "6.5"), ("delta02", "6.5"), ("str_coupling", "true")] {
                base.set(k, v)?;
            }
            SweepSpec::new(
                vec![
                    SweepAxis::range("eta", 0.25, 4.0, 41, Spacing::Log),
                    SweepAxis::range("k_on", 0.1, 50.0, 41, Spacing::Log),
                ],
                vec![Observable::EpsR],
                base,
            )
        }
        6 | 7 => {
            for (k, v) in [
                ("optical_depth", "200"),
                ("depth_reference", "resonant"),
                ("optical_line", "gaussian"),
                ("optical_width", "0.1"),
                ("k_off", "1"),
                ("k_on", "50"),
                ("tau_st", "0"),
                ("eta", "1"),
            ] {
                base.set(k, v)?;
            }
            let axes = if n == 6 {
                vec![
                    SweepAxis::range("delta01", 2.0, 20.0, 91, Spacing::Linear),
                    SweepAxis::range("tau_echo", 0.0, 150.0, 31, Spacing::Linear),
                ]
            } else {
                base.set("tau_echo", "10")?;
                vec![
                    SweepAxis::range("k_off", 0.1, 10.0, 41, Spacing::Log),
                    SweepAxis::range("delta01", 2.0, 20.0, 37, Spacing::Linear),
                ]
            };
            let mut s = SweepSpec::new(axes, vec![Observable::OverallEff], base);
            s.ties.push(("delta02".into(), "delta01".into()));
            s
        }
        _ => return Err(Error::config("figure", format!("figures 2 to 7 are available, got {n}"))),
    };
    Ok(spec)
}
