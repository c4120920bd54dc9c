use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use raman_echo::params::PhysicalParams;
use raman_echo::switching::*;

fn off(delta01: f64, k_off: f64) -> PhysicalParams {
    PhysicalParams {
        delta01,
        k_off,
        ..Default::default()
    }
}

fn on(delta02: f64, k_on: f64, eta: f64) -> PhysicalParams {
    PhysicalParams {
        delta01: delta02,
        delta02,
        k_on,
        eta,
        eta_prime: eta,
        ..Default::default()
    }
    .with_str_coupling()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// (ε_t, |R₁₃|²) after switch-off from R₁₂ = 1, R₁₃ = Ω/Δ₀.
fn asymptotic_pair(p: &PhysicalParams) -> (f64, f64) {
    let r13 = Complex64::new(p.omega1_rabi / p.delta01, 0.0);
    let c = switch_off_at(p, CoherencePair::new(one(), r13), 0.0, 0.0, 40.0 / p.k_off).unwrap();
    let n = 1.0 + r13.norm_sqr();
    (c.r12.norm_sqr() / n, c.r13.norm_sqr())
}

// 50-digit values from tests/oracle/gen_values.py.
#[test]
fn switch_off_matches_frozen_oracle() {
    for (d0, k, eps, r13) in [
        (5.0, 1.0, 0.9988321416839265, 0.001214572648716415),
        (3.0, 0.5, 0.9981272521453265, 0.002080830949637251),
        (10.0, 2.0, 0.9996430218623409, 0.0003605479190356426),
        (20.0, 0.3, 0.9999994360936907, 5.653160750910277e-7),
        (5.0, 20.0, 0.9638907038473203, 0.03755366799878688),
    ] {
        let (a, b) = asymptotic_pair(&off(d0, k));
        assert_relative_eq!(a, eps, max_relative = 1e-10);
        assert_relative_eq!(b, r13, max_relative = 1e-8);
    }
}

#[test]
fn switch_on_matches_frozen_oracle() {
    for (d0, kr, eta, c12) in [
        (6.5, 1.0, 1.0, 0.9781674740582973),
        (6.5, 0.5, 2.0, 0.9585143353321226),
        (10.0, 3.0, 0.5, 0.9954506648213559),
        (2.0, 0.2, 4.0, 0.723071708057195),
    ] {
        let c = switch_on_coefficients(&on(d0, kr, eta)).unwrap();
        assert_relative_eq!(c.c12.norm_sqr(), c12, max_relative = 1e-10);
        assert_relative_eq!(c.c13.norm_sqr(), 1.0 - c12, max_relative = 1e-8);
    }
}

#[test]
fn zeta_ratio_and_large_detuning_limit() {
    let p = off(10.0, 1.0);
    let (z12, z13) = zeta_factors(&p, 0.0, 0.0).unwrap();
    assert_relative_eq!(z13 / z12, 1.02, max_relative = 1e-14);
    let pair = init_coherence_after_storage(&p, 0.0, 0.0, Complex64::new(0.3, -0.2)).unwrap();
    assert_relative_eq!((pair.r13 / pair.r12).re, z13, max_relative = 1e-14);
    let (a, b) = zeta_factors(&off(1e5, 1.0), 0.0, 0.0).unwrap();
    assert_relative_eq!(a / b, 1.0, max_relative = 1e-9);
    assert_relative_eq!(b, 1e-5, max_relative = 1e-12);
}

#[test]
fn no_control_stores_nothing() {
    let p = PhysicalParams {
        omega1_rabi: 0.0,
        ..Default::default()
    };
    let pair = init_coherence_after_storage(&p, 0.0, 0.0, one()).unwrap();
    assert_eq!(pair.norm_sqr(), 0.0);
}

#[test]
fn resonant_atom_is_a_domain_error() {
    let p = off(5.0, 1.0);
    assert!(init_coherence_after_storage(&p, 0.0, 5.0, one()).is_err());
}

#[test]
fn rates_must_be_positive() {
    let pair = CoherencePair::new(one(), one());
    assert!(switch_off_coherences(&off(5.0, 0.0), pair, 0.0, 0.0).is_err());
    assert!(switch_off_coherences(&off(5.0, -1.0), pair, 0.0, 0.0).is_err());
    assert!(switch_on_coefficients_for(1.0, 0.0, one()).is_err());
}

#[test]
fn instantaneous_switch_leaves_moduli() {
    let p = off(5.0, 1e7);
    let init = CoherencePair::new(one(), Complex64::new(0.2, 0.0));
    let out = switch_off_coherences(&p, init, 0.0, 0.0).unwrap();
    assert!((out.r12.norm() - 1.0).abs() < 1e-6);
    assert!((out.r13.norm() - 0.2).abs() < 1e-6);
}

#[test]
fn slow_switch_empties_the_optical_coherence() {
    // |R₁₃(τ̃₁)/R₁₃(τ₀)|² with R₁₃(τ₀) = 1/20.
    let fast = asymptotic_pair(&off(20.0, 10.0)).1 * 400.0;
    let slow = asymptotic_pair(&off(20.0, 0.05)).1 * 400.0;
    assert!(slow < 1e-4, "{slow}");
    assert!(fast > 1e3 * slow);
}

#[test]
fn ode_without_control_is_free_rotation_and_decay() {
    let p = PhysicalParams {
        omega1_rabi: 0.0,
        gamma21: 0.05,
        ..off(5.0, 1.0)
    };
    let t = [0.0, 3.0, 20.0];
    let tr = switch_off_ode_trajectory(&p, CoherencePair::new(one(), one()), 0.0, 0.7, &t).unwrap();
    for (s, c) in t.iter().zip(&tr) {
        let want = Complex64::from_polar((-0.05 * s).exp(), -0.7 * s);
        assert!((c.r12 - want).norm() < 1e-9, "{s}: {} vs {want}", c.r12);
    }
}

#[test]
fn ode_horizon_must_cover_switch_off() {
    assert!(switch_off_ode_oracle(&off(5.0, 1.0), CoherencePair::new(one(), one()), 0.0, 0.0, 10.0).is_err());
}

#[test]
fn transfer_anchor_at_detuning_five() {
    let e = transfer_efficiency(&off(5.0, 50.0), 0.0, 0.0).unwrap();
    assert!((e - 0.96).abs() <= 0.02, "{e}");
    assert!((e - 1.0 / 1.04).abs() <= 0.005, "{e}");
    assert!(transfer_efficiency(&off(5.0, 1e-2), 0.0, 0.0).unwrap() > 0.9999);
}

#[test]
fn fast_switch_on_is_lossless_and_eta_independent() {
    let c = switch_on_coefficients(&on(20.0, 1e6, 1.0)).unwrap();
    assert!((c.c12.norm() - 1.0).abs() < 1e-6 && c.c13.norm() < 1e-6);
    let base = switch_on_efficiency(&on(6.5, 50.0, 1.0)).unwrap();
    for eta in [0.25, 0.5, 2.0, 4.0] {
        let e = switch_on_efficiency(&on(6.5, 50.0, eta)).unwrap();
        assert!((e / base - 1.0).abs() < 0.01, "η={eta}: {e} vs {base}");
    }
}

#[test]
fn switch_on_improves_with_rate() {
    for eta in [0.5, 1.0, 2.0] {
        let mut last = 0.0;
        for i in 0..30 {
            let k = 0.1 * 500f64.powf(i as f64 / 29.0);
            let e = switch_on_efficiency(&on(6.5, k, eta)).unwrap();
            assert!(e >= last - 1e-12, "η={eta} k={k}");
            last = e;
        }
    }
}

#[test]
fn switch_on_oracle_agrees() {
    for (d0, kr, eta) in [(6.5, 1.0, 1.0), (10.0, 3.0, 0.5), (2.0, 0.4, 4.0)] {
        let p = on(d0, kr, eta);
        let a = switch_on_coefficients(&p).unwrap();
        let b = switch_on_ode_oracle(&p).unwrap();
        assert!((a.c12 - b.c12).norm() < 1e-6 && (a.c13 - b.c13).norm() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn switch_off_conserves_norm(d0 in 2.0..40.0f64, lk in -3.0..3.9f64, r in -2.0..2.0f64, i in -2.0..2.0f64) {
        let p = off(d0, lk.exp());
        let init = CoherencePair::new(one(), Complex64::new(r, i));
        let out = switch_off_coherences(&p, init, 0.0, 0.0).unwrap();
        prop_assert!((out.norm_sqr() / init.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ode_trajectory_conserves_norm(d0 in 2.0..20.0f64, k in 0.2..5.0f64) {
        let p = off(d0, k);
        let init = CoherencePair::new(one(), Complex64::new(1.0 / d0, 0.0));
        let t: Vec<f64> = (0..8).map(|j| j as f64 * 3.0 / k).collect();
        for c in switch_off_ode_trajectory(&p, init, 0.0, 0.0, &t).unwrap() {
            prop_assert!((c.norm_sqr() / init.norm_sqr() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn switch_on_is_unitary(d0 in 2.0..40.0f64, lk in -2.3..3.9f64, eta in 0.25..4.0f64) {
        let c = switch_on_coefficients(&on(d0, lk.exp(), eta)).unwrap();
        prop_assert!((c.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eps_t_decreases_with_rate(d0 in 3.0..20.0f64, lk in -3.0..3.5f64) {
        let a = transfer_efficiency(&off(d0, lk.exp()), 0.0, 0.0).unwrap();
        let b = transfer_efficiency(&off(d0, (lk + 0.2).exp()), 0.0, 0.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-12);
    }
}
