use num_complex::Complex64;
use raman_echo::envelope::{Direction, PulseShape};
use raman_echo::mbsolver::Model;
use raman_echo::params::{QuadratureKind, QuadratureRule};
use raman_echo::pipeline::*;

fn config(kappa: f64, eta: f64) -> PipelineConfig {
    let mut c = PipelineConfig::default();
    c.params.optical_depth = kappa;
    c.params.eta = eta;
    c.params.eta_prime = eta;
    c.params.k_on = 50.0;
    c.params = c.params.with_str_coupling();
    c.broadening.quadrature = QuadratureRule {
        kind: QuadratureKind::Uniform,
        raman_nodes: 160,
        optical_nodes: 1,
        truncation: None,
    };
    c
}

#[test]
fn ideal_limit_recovers_the_reversed_pulse() {
    let r = run_pipeline(&config(200.0, 1.0)).unwrap();
    let w = r.waveform.unwrap();
    assert!(w.fidelity >= 0.99, "{w:?}");
    let dev = r.relative_deviation().unwrap();
    assert!(dev.abs() < 0.05, "sim {} analytic {}", r.simulated_efficiency, r.analytic.total);
    assert!((w.echo_time - r.timing.expected_echo).abs() <= 0.5);
    assert!(r.stored_fraction > 0.99);
}

#[test]
fn empty_medium_gives_no_echo() {
    let r = run_pipeline(&config(0.0, 1.0)).unwrap();
    assert_eq!(r.simulated_efficiency, 0.0);
    assert_eq!(r.analytic.total, 0.0);
    assert!(r.waveform.is_none());
    assert!(r.echo.energy() == 0.0);
}

#[test]
fn echo_duration_scales_as_one_over_eta() {
    for eta in [0.5, 2.0, 4.0] {
        let w = run_pipeline(&config(200.0, eta)).unwrap().waveform.unwrap();
        assert!((w.fwhm_ratio / eta - 1.0).abs() < 0.05, "η={eta}: {w:?}");
        assert!(w.fidelity > 0.99, "η={eta}: {w:?}");
    }
}

#[test]
fn two_lobe_pulse_comes_back_reversed() {
    let mut c = config(200.0, 2.0);
    c.pulse = PulseShape::TwoLobe {
        center: 0.0,
        bandwidth: 0.15,
        separation: 25.0,
        ratio: 0.5,
    };
    c.params.tau0 = 60.0;
    c.params.tau_echo = 200.0;
    let r = run_pipeline(&c).unwrap();
    let w = r.waveform.unwrap();
    assert!(w.fidelity > 0.99, "{w:?}");
    // The reversed echo has its strong lobe last.
    let peak = r
        .echo
        .samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| r.echo.axis[i])
        .unwrap();
    assert!(peak > w.echo_time, "peak {peak} echo {}", w.echo_time);
}

#[test]
fn backward_grating_does_not_radiate_forward() {
    let back = run_pipeline(&config(5.0, 1.0)).unwrap().simulated_efficiency;
    let mut c = config(5.0, 1.0);
    c.direction = Direction::Forward;
    // Mismatch of counter-propagating write and read wave vectors, in units of 1/L.
    c.phase_mismatch = 40.0;
    let fwd = run_pipeline(&c).unwrap().simulated_efficiency;
    assert!(fwd < 0.05 * back, "forward {fwd} backward {back}");
}

#[test]
fn joint_retrieval_rescaling_leaves_the_echo() {
    let mut a = config(5.0, 2.0);
    a.model = Model::Reduced;
    let mut b = a.clone();
    b.params.delta02 *= 2.0;
    b.params.omega2_rabi *= 2.0;
    let (ra, rb) = (run_pipeline(&a).unwrap(), run_pipeline(&b).unwrap());
    assert!((ra.simulated_efficiency / rb.simulated_efficiency - 1.0).abs() < 0.01);
    // Same waveform, compared without reversal.
    let num: Complex64 = ra
        .echo
        .axis
        .iter()
        .zip(&ra.echo.samples)
        .map(|(&t, x)| x.conj() * rb.echo.interp(t))
        .sum();
    let norm = |s: &[Complex64]| s.iter().map(|x| x.norm_sqr()).sum::<f64>();
    let overlap = num.norm_sqr() / (norm(&ra.echo.samples) * norm(&rb.echo.samples));
    assert!(overlap > 0.999, "{overlap}");
}

#[test]
fn timing_preconditions_are_checked() {
    let mut c = config(5.0, 1.0);
    c.params.tau0 = 10.0;
    assert!(run_pipeline(&c).is_err());
    let mut c = config(5.0, 1.0);
    c.params.tau_echo = 60.0;
    let e = run_pipeline(&c).unwrap_err();
    assert!(e.to_string().contains("tau_echo"), "{e}");
}

#[test]
fn runs_are_deterministic() {
    let c = config(5.0, 2.0);
    let (a, b) = (run_pipeline(&c).unwrap(), run_pipeline(&c).unwrap());
    assert_eq!(a.echo.samples, b.echo.samples);
    assert_eq!(a.simulated_efficiency, b.simulated_efficiency);
}
