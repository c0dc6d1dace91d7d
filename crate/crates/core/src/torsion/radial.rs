use std::io::Write;

use crate::error::{Error, Result};
use crate::quad::simpson_samples;
use crate::special::unit_ball_volume;

/// Hole radius of the critical perforation at period `eps`:
/// `exp(-1/(c ε²))` for d = 2, `c ε^{d/(d-2)}` for d > 2.
pub fn hole_radius(d: usize, c: f64, eps: f64) -> Result<f64> {
    if d < 2 || !(c > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "hole_radius needs d >= 2, c > 0, 0 < eps < 1 (got d={d}, c={c}, eps={eps})"
        )));
    }
    Ok(if d == 2 {
        (-1.0 / (c * eps * eps)).exp()
    } else {
        let df = d as f64;
        c * eps.powf(df / (df - 2.0))
    })
}

/// Zeroth-order coefficient of the homogenized limit:
/// `cπ/2` for d = 2, `d(d-2) 2^{-d} ω_d c^{d-2}` for d > 2.
pub fn k_constant(d: usize, c: f64) -> Result<f64> {
    if d < 2 || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "k_constant needs d >= 2 and c > 0 (got d={d}, c={c})"
        )));
    }
    Ok(if d == 2 {
        c * std::f64::consts::PI / 2.0
    } else {
        let df = d as f64;
        df * (df - 2.0) * 2f64.powf(-df) * unit_ball_volume(d) * c.powf(df - 2.0)
    })
}

/// Radial solution of `-Δu + K u = 1` in the unit ball with `u = 0` on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizedProfile {
    pub d: usize,
    pub k: f64,
    /// `u(r_i)` at `r_i = i / n`, `i = 0..=n`.
    pub radial_values: Vec<f64>,
    /// `∫_{B_1} u = d ω_d ∫_0^1 u(r) r^{d-1} dr`.
    pub torsion: f64,
}

impl HomogenizedProfile {
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let n = (self.radial_values.len() - 1) as f64;
        (0..self.radial_values.len()).map(move |i| i as f64 / n)
    }

    /// CSV with header `r,u`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,u")?;
        for (r, u) in self.radii().zip(&self.radial_values) {
            writeln!(w, "{},{}", crate::io::fmt_sig(r), crate::io::fmt_sig(*u))?;
        }
        Ok(())
    }
}

/// Second-order finite differences on `n + 1` nodes for
/// `-u'' - ((d-1)/r) u' + K u = 1`, `u'(0) = 0`, `u(1) = 0`.
///
/// The origin row uses the reflected node `u_{-1} = u_1`, where the radial
/// Laplacian becomes `d·u''(0)`.
pub fn torsion_homogenized_radial(d: usize, k: f64, n: usize) -> Result<HomogenizedProfile> {
    if d < 2 || !(k >= 0.0) || !k.is_finite() || n < 64 {
        return Err(Error::InvalidArgument(format!(
            "radial solver needs d >= 2, finite K >= 0, n >= 64 (got d={d}, K={k}, n={n})"
        )));
    }
    let dx = 1.0 / n as f64;
    let inv2 = 1.0 / (dx * dx);
    let df = d as f64;
    // unknowns u_0 .. u_{n-1}; u_n = 0
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    diag[0] = 2.0 * df * inv2 + k;
    upper[0] = -2.0 * df * inv2;
    for i in 1..n {
        let r = i as f64 * dx;
        let adv = (df - 1.0) / (2.0 * r * dx);
        lower[i] = -inv2 + adv;
        diag[i] = 2.0 * inv2 + k;
        upper[i] = -inv2 - adv;
    }
    let mut u = thomas(&lower, &diag, &upper, vec![1.0; n])?;
    u.push(0.0);

    let weighted: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, v)| v * (i as f64 * dx).powi(d as i32 - 1))
        .collect();
    let torsion = df * unit_ball_volume(d) * simpson_samples(&weighted, dx);
    Ok(HomogenizedProfile {
        d,
        k,
        radial_values: u,
        torsion,
    })
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i] * c[i - 1];
            rhs[i] -= lower[i] * rhs[i - 1];
        }
        if pivot.abs() < 1e-300 {
            return Err(Error::Solver(format!("zero pivot in tridiagonal row {i}")));
        }
        c[i] = upper[i] / pivot;
        rhs[i] /= pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::torsion_ball;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn hole_radii() {
        assert_relative_eq!(hole_radius(2, 1.0, 0.1).unwrap(), (-100f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(hole_radius(3, 2.0, 0.1).unwrap(), 0.002, max_relative = 1e-12);
        assert_relative_eq!(hole_radius(4, 1.0, 0.1).unwrap(), 0.01, max_relative = 1e-12);
        assert!(hole_radius(1, 1.0, 0.1).is_err());
        assert!(hole_radius(2, 1.0, 1.5).is_err());
    }

    #[test]
    fn k_constants() {
        assert_relative_eq!(k_constant(2, 1.0).unwrap(), PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(k_constant(3, 2.0).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(k_constant(2, 10.0).unwrap(), 5.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn zero_k_recovers_ball() {
        for d in 2..=6 {
            let p = torsion_homogenized_radial(d, 0.0, 1024).unwrap();
            assert!((p.torsion - torsion_ball(d, 1.0)).abs() < 1e-4, "d = {d}");
            // the quadratic (1 - r²)/(2d) is reproduced by the stencil
            for (r, u) in p.radii().zip(&p.radial_values) {
                assert!((u - (1.0 - r * r) / (2.0 * d as f64)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn profile_shape() {
        let p = torsion_homogenized_radial(2, 50.0, 256).unwrap();
        assert_eq!(*p.radial_values.last().unwrap(), 0.0);
        assert!(p.radial_values.windows(2).all(|w| w[1] <= w[0]));
        assert!((p.radial_values[1] - p.radial_values[0]).abs() < 1e-3 * p.radial_values[0]);
    }

    #[test]
    fn large_k_respects_bound() {
        let p = torsion_homogenized_radial(2, 1e4, 1024).unwrap();
        assert!(p.torsion <= PI * 1e-4);
    }

    #[test]
    fn constant_solution_limit() {
        // far from the boundary layer u ≈ 1/K
        let k = 1e4;
        let p = torsion_homogenized_radial(3, k, 4096).unwrap();
        assert_relative_eq!(p.radial_values[0], 1.0 / k, max_relative = 1e-6);
    }

    #[test]
    fn odd_grids_are_accepted() {
        let even = torsion_homogenized_radial(2, 3.0, 1024).unwrap();
        let odd = torsion_homogenized_radial(2, 3.0, 1023).unwrap();
        assert_relative_eq!(even.torsion, odd.torsion, max_relative = 1e-5);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(torsion_homogenized_radial(1, 0.0, 128).is_err());
        assert!(torsion_homogenized_radial(2, -1.0, 128).is_err());
        assert!(torsion_homogenized_radial(2, 0.0, 32).is_err());
    }
}
