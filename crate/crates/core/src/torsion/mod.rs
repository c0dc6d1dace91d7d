//! Torsional rigidity: closed forms, a cut-cell finite-difference solver for
//! planar regions, the rectangle series, and the radial homogenized problem
//! `-Δu + K u = 1` on the unit ball.

mod fd;
mod radial;

pub use fd::{torsion_fd_polygon, torsion_fd_region, GridLevel, TorsionSolution, CG_REL_TOL, MAX_GRID_NODES};
pub use radial::{hole_radius, k_constant, torsion_homogenized_radial, HomogenizedProfile};

use std::f64::consts::PI;

use crate::geometry::Ellipsoid;
use crate::special::unit_ball_volume;

/// `T(B_r) = r^{d+2} ω_d / (d (d+2))`.
pub fn torsion_ball(d: usize, r: f64) -> f64 {
    let df = d as f64;
    r.powf(df + 2.0) * unit_ball_volume(d) / (df * (df + 2.0))
}

/// `T(E_a) = ω_d/(d+2) · (Σ a_i^{-2})^{-1} · ∏ a_i`.
pub fn torsion_ellipsoid(e: &Ellipsoid) -> f64 {
    let a = e.semi_axes();
    let d = a.len() as f64;
    let inv2: f64 = a.iter().map(|x| 1.0 / (x * x)).sum();
    unit_ball_volume(a.len()) / (d + 2.0) / inv2 * a.iter().product::<f64>()
}

/// Torsion of the `a × b` rectangle from the separated-variables series
///
/// `T = (L s³ / 12) [1 - (192 s)/(π⁵ L) Σ_{n odd} tanh(nπL/(2s)) / n⁵]`
///
/// with `L = max(a, b)`, `s = min(a, b)`, truncated once a term falls below
/// 1e-14 of the running sum.
pub fn torsion_rectangle_series(a: f64, b: f64) -> f64 {
    let (long, short) = if a >= b { (a, b) } else { (b, a) };
    let ratio = long / short;
    let mut sum = 0.0;
    let mut n = 1.0_f64;
    loop {
        let term = (n * PI * ratio / 2.0).tanh() / n.powi(5);
        sum += term;
        if term < 1e-14 * sum {
            break;
        }
        n += 2.0;
    }
    long * short.powi(3) / 12.0 * (1.0 - 192.0 / (PI.powi(5) * ratio) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Double sine series `T = 64ab/π⁶ Σ_{m,n odd} 1/(m²n²(m²/a² + n²/b²))`,
    /// independent of the single-series route.
    fn double_series(a: f64, b: f64, terms: usize) -> f64 {
        let mut s = 0.0;
        for m in (1..terms).step_by(2) {
            for n in (1..terms).step_by(2) {
                let (m, n) = (m as f64, n as f64);
                s += 1.0 / (m * m * n * n * (m * m / (a * a) + n * n / (b * b)));
            }
        }
        64.0 * a * b / PI.powi(6) * s
    }

    #[test]
    fn ball_values() {
        assert_relative_eq!(torsion_ball(2, 1.0), PI / 8.0, max_relative = 1e-14);
        assert_relative_eq!(torsion_ball(3, 1.0), 4.0 * PI / 45.0, max_relative = 1e-14);
        assert_relative_eq!(torsion_ball(2, 2.0), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn ellipsoid_values() {
        let e = |a: Vec<f64>| Ellipsoid::new(a).unwrap();
        assert_relative_eq!(torsion_ellipsoid(&e(vec![1.0, 1.0])), PI / 8.0, max_relative = 1e-14);
        assert_relative_eq!(torsion_ellipsoid(&e(vec![2.0, 1.0])), 0.4 * PI, max_relative = 1e-14);
        assert_relative_eq!(
            torsion_ellipsoid(&e(vec![1.0, 1.0, 1.0])),
            4.0 * PI / 45.0,
            max_relative = 1e-14
        );
        for d in 2..8 {
            assert_relative_eq!(
                torsion_ellipsoid(&e(vec![1.7; d])),
                torsion_ball(d, 1.7),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn square_series_matches_double_series() {
        let t = torsion_rectangle_series(1.0, 1.0);
        assert_relative_eq!(t, 0.035144253738826, max_relative = 1e-12);
        assert_relative_eq!(t, double_series(1.0, 1.0, 4001), max_relative = 1e-9);
        assert_relative_eq!(
            torsion_rectangle_series(1.0, 0.1),
            double_series(1.0, 0.1, 4001),
            max_relative = 1e-8
        );
    }

    #[test]
    fn series_is_symmetric_and_scales() {
        assert_relative_eq!(
            torsion_rectangle_series(2.0, 0.3),
            torsion_rectangle_series(0.3, 2.0),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            torsion_rectangle_series(3.0, 3.0),
            81.0 * torsion_rectangle_series(1.0, 1.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn thin_rectangles_approach_slab_value() {
        let slab = |e: f64| e.powi(3) / 12.0;
        let t = torsion_rectangle_series(1.0, 0.1);
        assert!(t < slab(0.1) && t > 0.9 * slab(0.1));
        let t = torsion_rectangle_series(1.0, 0.01);
        assert!(t < slab(0.01) && t > 0.99 * slab(0.01));
    }

    #[test]
    fn monotone_under_inclusion() {
        let mut prev = 0.0;
        for k in 1..=20 {
            let w = 0.1 * k as f64;
            let t = torsion_rectangle_series(w, 0.5 + 0.05 * k as f64);
            assert!(t > prev);
            prev = t;
        }
    }
}
