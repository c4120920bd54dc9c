//! Exponential-integrator building blocks: scalar φ-functions and the
//! exponential of small dense complex matrices.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// (e^z, φ₁(z), φ₂(z)) with φ₁ = (e^z − 1)/z and φ₂ = (e^z − 1 − z)/z².
pub fn phi12(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let e = z.exp();
    if z.norm() > 0.5 {
        let p1 = (e - 1.0) / z;
        let p2 = (p1 - 1.0) / z;
        return (e, p1, p2);
    }
    // φ_k(z) = Σ z^m/(m+k)!
    let mut p1 = ZERO;
    let mut p2 = ZERO;
    let mut term = ONE; // z^m/m!
    for m in 0..24 {
        let mf = m as f64;
        p1 += term / (mf + 1.0);
        p2 += term / ((mf + 1.0) * (mf + 2.0));
        term = term * z / (mf + 1.0);
    }
    (e, p1, p2)
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// e^A for a small row-major n×n matrix by scaling, Taylor and squaring.
pub fn expm(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let x: Vec<Complex64> = a.iter().map(|v| v * scale).collect();
    let mut out = vec![ZERO; n * n];
    let mut term = vec![ZERO; n * n];
    for i in 0..n {
        out[i * n + i] = ONE;
        term[i * n + i] = ONE;
    }
    for k in 1..=18 {
        term = matmul(&term, &x, n);
        let inv = 1.0 / k as f64;
        term.iter_mut().for_each(|v| *v *= inv);
        out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
    }
    for _ in 0..s {
        out = matmul(&out, &out, n);
    }
    out
}

/// For a 2×2 matrix A and vector b: (e^A, φ₁(A)b, φ₂(A)b), read off the
/// exponential of the augmented matrix [[A, b, 0], [0, 0, 1], [0, 0, 0]].
pub fn phi_matrix2(a: [Complex64; 4], b: [Complex64; 2]) -> ([Complex64; 4], [Complex64; 2], [Complex64; 2]) {
    let mut w = vec![ZERO; 16];
    w[0] = a[0];
    w[1] = a[1];
    w[4] = a[2];
    w[5] = a[3];
    w[2] = b[0];
    w[6] = b[1];
    w[11] = ONE;
    let e = expm(&w, 4);
    ([e[0], e[1], e[4], e[5]], [e[2], e[6]], [e[3], e[7]])
}
