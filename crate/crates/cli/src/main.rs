use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use raman_echo::config::RunConfig;
use raman_echo::efficiency::EfficiencyBreakdown;
use raman_echo::pipeline::run_pipeline;
use raman_echo::str_verifier::{storage_trajectory, str_check, StrForm, StrTransform};
use raman_echo::sweep::{
    figure_spec, header_record, run_sweep_with_jobs, AxisValues, Format, Observable, Spacing, SweepAxis, SweepResult,
    SweepSpec,
};
use raman_echo::Error;

#[derive(Parser)]
#[command(name = "raman-echo", version, about = "Raman echo memory: sweeps, pipeline runs and STR checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. --set delta01=10 (repeatable; beats the file)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pass/fail tolerance; failing checks exit with status 3
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Remnant |R13|² and transfer efficiency after the control switch-off
    SwitchOff(SweepArgs),
    /// Switch-on efficiency ε_r
    SwitchOn(SweepArgs),
    /// Overall efficiency and its dephasing factor over a parameter grid
    EfficiencyMap(SweepArgs),
    /// Storage, switch-off, switch-on and retrieval in one simulated run
    Pipeline,
    /// STR residuals of the exact transform and of single-condition violations
    StrCheck {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 2.0])]
        eta: Vec<f64>,
    },
    /// Bundled parameter grid number 2 to 7 (switching, efficiency maps)
    Figure { number: u32 },
}

#[derive(Args)]
struct SweepArgs {
    /// name=min:max:count[:log] or name=v1,v2,... (repeatable, at most 3)
    #[arg(long = "axis")]
    axes: Vec<String>,
    /// Observables to report instead of the subcommand's default
    #[arg(long = "observable", value_delimiter = ',')]
    observables: Vec<String>,
}

enum Failure {
    Run(Error),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn parse_axis(s: &str) -> Result<SweepAxis, Error> {
    let bad = || Error::config("axis", format!("expected name=min:max:count[:log] or name=v1,v2,..., got `{s}`"));
    let (name, spec) = s.split_once('=').ok_or_else(bad)?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
    let values = if spec.contains(':') {
        let f: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&f.len()) {
            return Err(bad());
        }
        let spacing = match f.get(3).copied() {
            None | Some("lin") => Spacing::Linear,
            Some("log") => Spacing::Log,
            _ => return Err(bad()),
        };
        AxisValues::Range {
            min: num(f[0])?,
            max: num(f[1])?,
            count: f[2].trim().parse().map_err(|_| bad())?,
            spacing,
        }
    } else if spec.trim().is_empty() {
        AxisValues::List(Vec::new())
    } else {
        AxisValues::List(spec.split(',').map(num).collect::<Result<_, _>>()?)
    };
    Ok(SweepAxis {
        name: name.trim().to_string(),
        values,
    })
}

fn sweep_spec(base: RunConfig, args: &SweepArgs, default_axes: &[&str], default_obs: &[Observable]) -> Result<SweepSpec, Error> {
    let axes = if args.axes.is_empty() {
        default_axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?
    } else {
        args.axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?
    };
    let observables = if args.observables.is_empty() {
        default_obs.to_vec()
    } else {
        args.observables
            .iter()
            .map(|o| Observable::parse(o))
            .collect::<Result<_, _>>()?
    };
    Ok(SweepSpec::new(axes, observables, base))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn render(result: &SweepResult, format: Format) -> String {
    match format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    }
}

/// Sidecar path `<out stem>.<tag>.csv` next to the main output.
fn sidecar(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("pipeline");
    out.with_file_name(format!("{stem}.{tag}.csv"))
}

fn pipeline(base: &RunConfig, c: &Common, format: Format) -> Result<(), Failure> {
    let cfg = base.resolve()?;
    let r = run_pipeline(&cfg)?;
    let mut columns: Vec<String> = vec![
        "tau0".into(),
        "tau1_off".into(),
        "flip".into(),
        "tau2_on".into(),
        "retrieval_end".into(),
        "expected_echo".into(),
        "stored_fraction".into(),
        "simulated_efficiency".into(),
    ];
    columns.extend(EfficiencyBreakdown::COLUMNS.iter().map(|s| format!("analytic_{s}")));
    columns.extend(["relative_deviation", "fidelity", "echo_time", "fwhm_in", "fwhm_out", "fwhm_ratio"].map(String::from));
    let t = r.timing;
    let mut row = vec![
        t.tau0,
        t.tau1_off,
        t.flip,
        t.tau2_on,
        t.retrieval_end,
        t.expected_echo,
        r.stored_fraction,
        r.simulated_efficiency,
    ];
    row.extend(r.analytic.values());
    row.push(r.relative_deviation().unwrap_or(f64::NAN));
    let w = r.waveform;
    row.extend(match w {
        Some(w) => [w.fidelity, w.echo_time, w.fwhm_in, w.fwhm_out, w.fwhm_ratio],
        None => [0.0, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
    });
    let result = SweepResult {
        header: header_record(base),
        columns,
        rows: vec![row],
        errors: vec![w.is_none().then(|| "no echo energy; waveform metrics undefined".to_string())],
    };
    if let Some(out) = &c.out {
        r.transmitted.write_csv(&sidecar(out, "transmitted"))?;
        r.echo.write_csv(&sidecar(out, "echo"))?;
    }
    write_output(c.out.as_deref(), &render(&result, format))?;
    if let Some(tol) = c.tolerance {
        let dev = r.relative_deviation().map_or(0.0, f64::abs);
        if dev > tol {
            return Err(Failure::Acceptance(format!(
                "simulated efficiency deviates from analytic by {dev:.3e} > {tol}"
            )));
        }
    }
    Ok(())
}

fn str_report(base: &RunConfig, c: &Common, format: Format, etas: &[f64]) -> Result<(), Failure> {
    let cfg = base.resolve()?;
    let storage = storage_trajectory(&cfg.params, &cfg.broadening, &cfg.pulse, cfg.dt, cfg.nz)?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut columns: Vec<String> = vec!["eta".into(), "form".into(), "exact_residual".into()];
    let mut failure = None;
    for (fi, form) in [StrForm::First, StrForm::Second, StrForm::Third].into_iter().enumerate() {
        for &eta in etas {
            let check = str_check(&storage, &StrTransform::new(eta, form)?)?;
            if columns.len() == 3 {
                for (cond, _, _) in &check.violations {
                    columns.push(format!("{}_residual", cond.name()));
                    columns.push(format!("{}_ratio", cond.name()));
                }
            }
            let mut row = vec![eta, (fi + 1) as f64, check.exact_residual];
            for &(_, r, ratio) in &check.violations {
                row.extend([r, ratio]);
            }
            if let Some(tol) = c.tolerance {
                let weak = check.violations.iter().find(|v| v.2 < 10.0);
                if check.exact_residual > tol {
                    failure.get_or_insert(format!("η={eta} {form:?}: exact residual {:.3e} > {tol}", check.exact_residual));
                } else if let Some(v) = weak {
                    failure.get_or_insert(format!("η={eta} {form:?}: {} violation only raises the residual {:.1}×", v.0.name(), v.2));
                }
            }
            rows.push(row);
            errors.push(None);
        }
    }
    let result = SweepResult {
        header: header_record(base),
        columns,
        rows,
        errors,
    };
    write_output(c.out.as_deref(), &render(&result, format))?;
    failure.map_or(Ok(()), |f| Err(Failure::Acceptance(f)))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    let mut base = match &c.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for s in &c.set {
        base.apply_override(s)?;
    }
    let format = Format::parse(&c.format)?;
    let jobs = c.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
    let spec = match &cli.command {
        Command::Pipeline => return pipeline(&base, c, format),
        Command::StrCheck { eta } => return str_report(&base, c, format, eta),
        Command::SwitchOff(a) => sweep_spec(
            base,
            a,
            &["k_off=0.05:50:61:log"],
            &[Observable::RemnantR13, Observable::EpsT],
        )?,
        Command::SwitchOn(a) => sweep_spec(base, a, &["k_on=0.1:50:41:log"], &[Observable::EpsR])?,
        Command::EfficiencyMap(a) => sweep_spec(
            base,
            a,
            &["delta01=2:20:19", "tau_echo=0:150:16"],
            &[Observable::OverallEff, Observable::GammaFactor],
        )?,
        Command::Figure { number } => {
            let mut s = figure_spec(*number)?;
            if let Some(p) = &c.config {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.clone(),
                    source,
                })?;
                s.base.merge_text(&text)?;
            }
            for o in &c.set {
                s.base.apply_override(o)?;
            }
            s
        }
    };
    let result = run_sweep_with_jobs(&spec, jobs)?;
    write_output(c.out.as_deref(), &render(&result, format))?;
    if let Some(tol) = c.tolerance {
        let failed = result.errors.iter().filter(|e| e.is_some()).count();
        if failed as f64 > tol * result.rows.len() as f64 {
            return Err(Failure::Acceptance(format!("{failed} of {} points failed", result.rows.len())));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
        Err(Failure::Acceptance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
