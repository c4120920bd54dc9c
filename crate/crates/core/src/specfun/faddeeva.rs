//! Faddeeva function w(z) = e^{-z²} erfc(-iz) by Weideman's rational expansion
//! (SIAM J. Numer. Anal. 31, 1994), N = 64 terms. Coefficients are computed
//! once from a discrete Fourier transform.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const N: usize = 64;

struct Weideman {
    l: f64,
    coef: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = 2 * N;
        let m2 = 2 * m;
        let l = (N as f64 / 2f64.sqrt()).sqrt();
        // f sampled at θ_k = kπ/M, k = -M+1..M-1, with a leading zero, then fftshifted.
        let mut f = vec![0.0; m2];
        for (idx, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (theta / 2.0).tan();
            f[idx + 1] = (-t * t).exp() * (l * l + t * t);
        }
        f.rotate_left(m2 / 2);
        let coef = (1..=N)
            .map(|j| {
                let mut acc = 0.0;
                for (n, v) in f.iter().enumerate() {
                    acc += v * (2.0 * PI * (j * n) as f64 / m2 as f64).cos();
                }
                acc / m2 as f64
            })
            .collect();
        Weideman { l, coef }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let t = weideman();
    let i = Complex64::i();
    let den = t.l - i * z;
    let zz = (t.l + i * z) / den;
    let mut p = Complex64::new(0.0, 0.0);
    for c in t.coef.iter().rev() {
        p = p * zz + c;
    }
    2.0 * p / (den * den) + (1.0 / PI.sqrt()) / den
}

/// Faddeeva function for any complex z.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        2.0 * (-z * z).exp() - w_upper(-z)
    }
}
