use num_complex::Complex64;
use proptest::prelude::*;
use raman_echo::envelope::{Direction, Domain, FieldEnvelope, PulseShape};
use raman_echo::params::*;
use raman_echo::str_verifier::*;

fn two_lobe() -> PulseShape {
    PulseShape::TwoLobe {
        center: 0.0,
        bandwidth: 0.3,
        separation: 12.0,
        ratio: 0.4,
    }
}

fn sampled(shape: &PulseShape, axis: Vec<f64>, f: impl Fn(f64) -> f64) -> FieldEnvelope {
    let s = axis.iter().map(|&t| shape.amplitude(f(t))).collect();
    FieldEnvelope::new(axis, s, Domain::Time, 0.0, Direction::Forward).unwrap()
}

/// Input on step h and its exact STR image on step h/η, so the image
/// points −η(τ − τ_e) land on input samples.
fn exact_pair(eta: f64, tau_e: f64) -> (FieldEnvelope, FieldEnvelope) {
    let h = 0.1;
    let input = sampled(&two_lobe(), (0..=600).map(|i| -30.0 + h * i as f64).collect(), |t| t);
    let echo_axis: Vec<f64> = (0..=600).map(|i| tau_e - 30.0 / eta + h / eta * i as f64).collect();
    let mut echo = sampled(&two_lobe(), echo_axis, |t| -eta * (t - tau_e));
    echo = echo.scaled(Complex64::new(0.0, -0.7));
    (input, echo)
}

#[test]
fn exact_image_has_unit_fidelity() {
    for eta in [0.5, 1.0, 2.0, 4.0] {
        let (input, echo) = exact_pair(eta, 100.0);
        let f = waveform_fidelity(&input, &echo, eta, 100.0).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "η={eta}: {f}");
        let (t, fb) = best_echo_time(&input, &echo, eta).unwrap();
        assert!((t - 100.0).abs() < 1e-3 && fb >= f - 1e-12, "η={eta}: {t} {fb}");
    }
}

#[test]
fn unreversed_copy_is_not_an_echo() {
    let eta = 2.0;
    let (input, _) = exact_pair(eta, 100.0);
    let axis: Vec<f64> = (0..=600).map(|i| 100.0 - 15.0 + 0.05 * i as f64).collect();
    let copy = sampled(&two_lobe(), axis, |t| eta * (t - 100.0));
    let (_, f) = best_echo_time(&input, &copy, eta).unwrap();
    assert!(f < 0.9, "{f}");
}

#[test]
fn zero_energy_echo_is_an_error() {
    let (input, echo) = exact_pair(1.0, 0.0);
    let dark = echo.scaled(Complex64::new(0.0, 0.0));
    assert!(waveform_fidelity(&input, &dark, 1.0, 0.0).is_err());
}

#[test]
fn gradient_flip_scales_and_inverts() {
    let b = BroadeningSpec {
        raman_line: RamanLine::LongitudinalGradient { chi: 3.0 },
        ..Default::default()
    };
    let f = gem_gradient_flip(&b, 2.0).unwrap();
    assert_eq!(f.raman_line, RamanLine::LongitudinalGradient { chi: -6.0 });
    assert!(gem_gradient_flip(&BroadeningSpec::default(), 2.0).is_err());
}

#[test]
fn retrieval_params_meet_the_coupling_condition() {
    let storage = PhysicalParams {
        delta01: 10.0,
        ..Default::default()
    };
    for form in [StrForm::First, StrForm::Second, StrForm::Third] {
        let t = StrTransform::new(2.0, form).unwrap();
        let r = t.retrieval_params(&storage, 8.0);
        let want = t.coupling_factor() * storage.coupling_ratio(Stage::First);
        assert!((r.coupling_ratio(Stage::Second) - want).abs() < 1e-15);
        assert_eq!(r.delta02.abs(), 8.0);
    }
    assert!(StrTransform::new(0.0, StrForm::First).is_err());
}

fn storage(kappa: f64, dt: f64, nz: usize, raman: RamanLine) -> StrTrajectory {
    let p = PhysicalParams {
        optical_depth: kappa,
        ..Default::default()
    };
    let b = BroadeningSpec {
        raman_line: raman,
        quadrature: QuadratureRule {
            kind: QuadratureKind::Uniform,
            raman_nodes: 64,
            optical_nodes: 1,
            truncation: None,
        },
        ..Default::default()
    };
    let pulse = PulseShape::Gaussian {
        center: 0.0,
        bandwidth: 0.2,
    };
    storage_trajectory(&p, &b, &pulse, dt, nz).unwrap()
}

fn same(a: &StrTrajectory, b: &StrTrajectory) -> bool {
    let close = |x: &[Complex64], y: &[Complex64]| x.len() == y.len() && x.iter().zip(y).all(|(x, y)| (x - y).norm() <= 1e-12 * (1.0 + x.norm()));
    let closef = |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    close(&a.field, &b.field)
        && close(&a.coherence, &b.coherence)
        && closef(&a.tau, &b.tau)
        && closef(&a.detuning, &b.detuning)
        && (a.coupling - b.coupling).abs() <= 1e-14
        && a.direction == b.direction
}

#[test]
fn transform_and_inverse_compose_to_identity() {
    let s = storage(1.0, 0.25, 41, RamanLine::Gaussian { width: 0.5 });
    for form in [StrForm::First, StrForm::Second, StrForm::Third] {
        for eta in [0.5, 2.0, 3.0] {
            let t = StrTransform::new(eta, form).unwrap();
            let back = apply_str(&apply_str(&s, &t).unwrap(), &t.inverse()).unwrap();
            assert!(same(&back, &s), "{form:?} η={eta}");
        }
    }
}

#[test]
fn forms_agree_in_field_modulus() {
    let s = storage(1.0, 0.25, 41, RamanLine::Gaussian { width: 0.5 });
    let a = apply_str(&s, &StrTransform::new(2.0, StrForm::First).unwrap()).unwrap();
    for form in [StrForm::Second, StrForm::Third] {
        let b = apply_str(&s, &StrTransform::new(2.0, form).unwrap()).unwrap();
        assert!(a.field.iter().zip(&b.field).all(|(x, y)| (x.norm() - y.norm()).abs() < 1e-15));
    }
}

#[test]
fn exact_transform_solves_the_retrieval_equations() {
    let s = storage(1.0, 0.125, 201, RamanLine::Gaussian { width: 0.5 });
    let crib = str_check(&s, &StrTransform::crib()).unwrap();
    assert!(crib.exact_residual < 1e-4, "{}", crib.exact_residual);
    for eta in [0.5, 2.0] {
        for form in [StrForm::First, StrForm::Second, StrForm::Third] {
            let c = str_check(&s, &StrTransform::new(eta, form).unwrap()).unwrap();
            assert!(c.exact_residual < 1e-4, "{form:?} η={eta}: {}", c.exact_residual);
            assert!((c.exact_residual / crib.exact_residual - 1.0).abs() < 1e-6);
            for (cond, _, ratio) in &c.violations {
                assert!(*ratio >= 10.0, "{form:?} η={eta} {}: {ratio}", cond.name());
            }
        }
    }
}

#[test]
fn gradient_storage_also_reverses() {
    let s = storage(1.0, 0.25, 401, RamanLine::LongitudinalGradient { chi: 2.0 });
    let c = str_check(&s, &StrTransform::new(2.0, StrForm::First).unwrap()).unwrap();
    assert!(c.exact_residual < 1e-3, "{}", c.exact_residual);
    for (cond, _, ratio) in &c.violations {
        assert!(*ratio >= 10.0, "{}: {ratio}", cond.name());
    }
}

#[test]
fn broadened_optical_line_is_refused() {
    let p = PhysicalParams::default();
    let b = BroadeningSpec {
        optical_line: OpticalLine::Gaussian { width: 0.1 },
        quadrature: QuadratureRule {
            kind: QuadratureKind::Uniform,
            raman_nodes: 16,
            optical_nodes: 3,
            truncation: None,
        },
        ..Default::default()
    };
    let pulse = PulseShape::Gaussian {
        center: 0.0,
        bandwidth: 0.2,
    };
    assert!(storage_trajectory(&p, &b, &pulse, 0.25, 21).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fidelity_is_bounded_and_phase_blind(eta in 0.3..4.0f64, shift in -3.0..3.0f64, phase in 0.0..6.28f64) {
        let (input, echo) = exact_pair(eta, 50.0);
        let f = waveform_fidelity(&input, &echo, eta, 50.0 + shift).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        let g = waveform_fidelity(&input, &echo.scaled(Complex64::from_polar(2.5, phase)), eta, 50.0 + shift).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }
}
