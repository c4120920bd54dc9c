//! Complex Gamma function: Lanczos approximation (g = 607/128, 15 terms) in
//! logarithmic form, with reflection for Re z < 1/2.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::SpecFunError;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// ln sin(πz) on some branch, without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        (z * PI).sin().ln()
    } else if z.im > 0.0 {
        Complex64::new(0.5, 0.0).ln() + (i * 0.5 * PI) - i * PI * z
            + (1.0 - (2.0 * i * PI * z).exp()).ln()
    } else {
        Complex64::new(0.5, 0.0).ln() - (i * 0.5 * PI) + i * PI * z
            + (1.0 - (-2.0 * i * PI * z).exp()).ln()
    }
}

/// ln Γ(z) on a branch that is continuous only in the right half-plane.
/// Intended for exponentiation, not for branch-sensitive use.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    if is_pole(z) {
        return Err(SpecFunError::Pole(z.re));
    }
    if z.re < 0.5 {
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_lanczos(1.0 - z))
    } else {
        Ok(ln_gamma_lanczos(z))
    }
}

/// Γ(z) for complex z. Poles at the nonpositive integers are reported as errors.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if z.im == 0.0 && z.re > 0.0 && z.re == z.re.round() && z.re <= 171.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u32) {
            f *= k as f64;
        }
        return Ok(Complex64::new(f, 0.0));
    }
    Ok(ln_gamma(z)?.exp())
}

/// 1/Γ(z), an entire function: zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if is_pole(z) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((-ln_gamma(z)?).exp())
}
