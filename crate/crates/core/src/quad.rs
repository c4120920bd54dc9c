//! Adaptive Gauss–Legendre quadrature for complex integrands on finite intervals.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(15)
            .expect("15-point Gauss-Legendre rule")
            .as_node_weight_pairs()
            .to_vec()
    })
}

fn panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<Complex64>() * h
}

fn recurse<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let both = left + right;
    if depth == 0 || (both - whole).norm() <= tol.max(64.0 * f64::EPSILON * (left.norm() + right.norm())) {
        return both;
    }
    recurse(f, a, m, left, 0.5 * tol, depth - 1) + recurse(f, m, b, right, 0.5 * tol, depth - 1)
}

/// ∫_a^b f, refining panels until successive estimates agree to `tol`
/// (absolute). `breaks` are interior points where f is sharply peaked.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Complex64 {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let n = (pts.len() - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let whole = panel(&mut f, w[0], w[1]);
        acc += recurse(&mut f, w[0], w[1], whole, tol / n, 40);
    }
    acc
}
