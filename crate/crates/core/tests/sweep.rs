use std::path::Path;

use proptest::prelude::*;
use raman_echo::config::RunConfig;
use raman_echo::sweep::*;

fn k_sweep(count: usize) -> SweepSpec {
    SweepSpec::new(
        vec![SweepAxis::range("k_off", 0.05, 50.0, count, Spacing::Log), SweepAxis::list("delta01", &[3.0, 20.0])],
        vec![Observable::EpsT, Observable::RemnantR13],
        RunConfig::default(),
    )
}

#[test]
fn rows_are_row_major_with_exact_endpoints() {
    let r = run_sweep(&k_sweep(5)).unwrap();
    assert_eq!(r.columns, ["k_off", "delta01", "eps_t", "remnant_r13"]);
    let k = r.column("k_off").unwrap();
    let d = r.column("delta01").unwrap();
    assert_eq!((k[0], k[9]), (0.05, 50.0));
    assert_eq!(&d[..4], [3.0, 20.0, 3.0, 20.0]);
}

#[test]
fn parallel_equals_serial() {
    let spec = k_sweep(23);
    let serial = run_sweep_with_jobs(&spec, 1).unwrap();
    for jobs in [2, 7] {
        assert_eq!(run_sweep_with_jobs(&spec, jobs).unwrap().to_csv(), serial.to_csv());
    }
    assert_eq!(run_sweep(&spec).unwrap(), serial);
}

#[test]
fn ties_and_ratio_columns() {
    let mut spec = SweepSpec::new(
        vec![SweepAxis::list("delta02", &[4.0, 8.0])],
        vec![Observable::EpsR],
        RunConfig::default(),
    );
    spec.ties.push(("delta01".into(), "delta02".into()));
    spec.ratios.push(RatioColumn {
        name: "ratio".into(),
        numerator: "k_on".into(),
        denominator: "delta01".into(),
    });
    let r = run_sweep(&spec).unwrap();
    let k_on: f64 = RunConfig::default().get("k_on").unwrap().parse().unwrap();
    assert_eq!(r.column("ratio").unwrap(), [k_on / 4.0, k_on / 8.0]);
}

#[test]
fn bad_specs_are_config_errors() {
    let base = RunConfig::default();
    let bad = [
        SweepSpec::new(vec![SweepAxis::list("nope", &[1.0])], vec![Observable::EpsT], base.clone()),
        SweepSpec::new(vec![SweepAxis::range("k_off", 0.0, 1.0, 5, Spacing::Log)], vec![Observable::EpsT], base.clone()),
        SweepSpec::new(vec![SweepAxis::range("k_off", 0.1, 1.0, 1, Spacing::Linear)], vec![Observable::EpsT], base.clone()),
        SweepSpec::new(vec![SweepAxis::list("k_off", &[f64::NAN])], vec![Observable::EpsT], base.clone()),
        SweepSpec::new(vec![SweepAxis::list("k_off", &[1.0])], vec![], base.clone()),
        SweepSpec::new(
            ["k_off", "k_on", "eta", "delta01"].iter().map(|a| SweepAxis::list(a, &[1.0])).collect(),
            vec![Observable::EpsT],
            base,
        ),
    ];
    for s in bad {
        assert!(run_sweep(&s).unwrap_err().is_config());
    }
    assert!(figure_spec(1).unwrap_err().is_config());
    assert!(Observable::parse("nope").is_err());
}

#[test]
fn failing_points_are_recorded_per_row() {
    let spec = SweepSpec::new(vec![SweepAxis::list("k_off", &[1.0, -1.0, 2.0])], vec![Observable::EpsT], RunConfig::default());
    let r = run_sweep(&spec).unwrap();
    assert!(r.errors[0].is_none() && r.errors[2].is_none());
    assert!(r.errors[1].is_some() && r.rows[1][1].is_nan());
}

#[test]
fn empty_sweep_is_header_only() {
    let spec = SweepSpec::new(vec![SweepAxis::list("k_off", &[])], vec![Observable::EpsT], RunConfig::default());
    let r = run_sweep(&spec).unwrap();
    assert!(r.rows.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit(&r, Format::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["k_off,eps_t,error"]);
    assert_eq!(SweepResult::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn io_errors_name_the_path() {
    let r = run_sweep(&k_sweep(2)).unwrap();
    let e = emit(&r, Format::Json, Path::new("/nonexistent/dir/out.json")).unwrap_err();
    assert!(e.to_string().contains("/nonexistent/dir/out.json"), "{e}");
}

#[test]
fn every_figure_bundle_validates() {
    for n in 2..=7 {
        figure_spec(n).unwrap().validate().unwrap();
    }
}

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => -1e-300..1e-300f64,
    ]
}

proptest! {
    #[test]
    fn emit_then_parse_is_the_identity(rows in prop::collection::vec(prop::collection::vec(value(), 3), 0..12)) {
        let errors = rows
            .iter()
            .map(|r| r.iter().any(|v| v.is_nan()).then(|| "domain error: bad, point".to_string()))
            .collect();
        let r = SweepResult {
            header: vec![("tool".into(), "x".into()), ("delta01".into(), "20".into())],
            columns: vec!["a".into(), "b".into(), "c".into()],
            rows,
            errors,
        };
        let same = |x: &SweepResult| {
            x.rows.iter().flatten().zip(r.rows.iter().flatten()).all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
                && x.rows.len() == r.rows.len()
                && x.header == r.header
                && x.columns == r.columns
        };
        let csv = SweepResult::from_csv(&r.to_csv()).unwrap();
        let json = SweepResult::from_json(&r.to_json()).unwrap();
        prop_assert!(same(&csv) && same(&json));
        prop_assert_eq!(csv.to_csv(), json.to_csv());
    }
}
