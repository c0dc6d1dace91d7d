//! One-dimensional quadrature used across the crate.

/// Adaptive Simpson integration of `f` over `[a, b]` with tolerance `tol` on the
/// absolute error of each panel.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson rule on `n` uniform intervals. Odd `n` closes with a 3/8 panel.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2, "composite Simpson needs at least two intervals");
    let dx = (b - a) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| f(a + i as f64 * dx)).collect();
    simpson_samples(&values, dx)
}

/// Composite Simpson on samples of a uniform grid with `values.len() - 1` intervals.
pub fn simpson_samples(values: &[f64], dx: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 2, "composite Simpson needs at least two intervals");
    let even = if n.is_multiple_of(2) { n } else { n - 3 };
    let mut sum = 0.0;
    if even > 0 {
        sum += values[0] + values[even];
        for (i, v) in values.iter().enumerate().take(even).skip(1) {
            sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        sum *= dx / 3.0;
    }
    if even != n {
        let v = &values[even..];
        sum += 3.0 * dx / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
    }
    sum
}
