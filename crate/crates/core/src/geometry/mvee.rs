use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use super::{ConvexPolygon2D, Point};
use crate::error::{Error, Result};

/// Default optimality tolerance for [`mvee`].
pub const MVEE_TOL: f64 = 1e-7;
/// Iteration cap for [`mvee`].
pub const MVEE_MAX_ITERS: usize = 100_000;

/// Planar ellipse `(x - c)ᵀ M (x - c) <= 1` in general orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnclosingEllipse {
    pub center: Point,
    pub shape: [[f64; 2]; 2],
}

impl EnclosingEllipse {
    fn m(&self) -> Matrix2<f64> {
        Matrix2::new(self.shape[0][0], self.shape[0][1], self.shape[1][0], self.shape[1][1])
    }

    /// Value of the quadratic form at `p`; `<= 1` inside.
    pub fn level(&self, p: Point) -> f64 {
        let v = Vector2::new(p[0] - self.center[0], p[1] - self.center[1]);
        v.dot(&(self.m() * v))
    }

    /// Semi-axes, largest first.
    pub fn semi_axes(&self) -> [f64; 2] {
        let eig = self.m().symmetric_eigenvalues();
        let (lo, hi) = (eig[0].min(eig[1]), eig[0].max(eig[1]));
        [1.0 / lo.sqrt(), 1.0 / hi.sqrt()]
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI / self.m().determinant().sqrt()
    }

    /// Homothetic copy scaled by `t` about the center.
    pub fn scaled(&self, t: f64) -> Self {
        let s = 1.0 / (t * t);
        let mut shape = self.shape;
        for row in shape.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        Self {
            center: self.center,
            shape,
        }
    }

    /// Support function `max_{x ∈ E} n·x`.
    pub fn support(&self, n: Point) -> f64 {
        let inv = self.m().try_inverse().expect("ellipse shape is positive definite");
        let v = Vector2::new(n[0], n[1]);
        n[0] * self.center[0] + n[1] * self.center[1] + v.dot(&(inv * v)).sqrt()
    }

    /// Containment in a convex polygon, up to `tol` (absolute) per edge.
    pub fn inside(&self, poly: &ConvexPolygon2D, tol: f64) -> bool {
        poly.half_planes()
            .iter()
            .all(|h| self.support(h.normal) <= h.offset + tol)
    }
}

/// Minimum-volume enclosing ellipse of planar points.
///
/// Khachiyan's barycentric ascent on the lifted points `(x, 1)`, with the
/// Todd–Yildirim away steps so convergence is linear. Stops once every weight
/// is within relative `tol` of optimality; the result is then scaled so that
/// every input point lies inside.
pub fn mvee(points: &[Point], tol: f64) -> Result<EnclosingEllipse> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("mvee tolerance must be positive".into()));
    }
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {n}")));
    }
    // affine rank check on the centered second moment
    let mean = points.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
    let mean = [mean[0] / n as f64, mean[1] / n as f64];
    let mut cov = Matrix2::zeros();
    let mut scale2: f64 = 0.0;
    for p in points {
        let v = Vector2::new(p[0] - mean[0], p[1] - mean[1]);
        cov += v * v.transpose();
        scale2 = scale2.max(v.norm_squared());
    }
    if cov.determinant() <= 1e-20 * (n as f64 * scale2).powi(2) {
        return Err(Error::DegenerateInput("points are (nearly) collinear".into()));
    }

    let d = 2.0;
    let lifted: Vec<Vector3<f64>> = points
        .iter()
        .map(|p| Vector3::new(p[0] - mean[0], p[1] - mean[1], 1.0))
        .collect();
    let mut u = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..MVEE_MAX_ITERS {
        let mut x = Matrix3::zeros();
        for (q, &w) in lifted.iter().zip(&u) {
            x += w * q * q.transpose();
        }
        let xinv = x
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("moment matrix is singular".into()))?;
        let omega: Vec<f64> = lifted.iter().map(|q| q.dot(&(xinv * q))).collect();
        let (jmax, wmax) = omega
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, w)| if w > b.1 { (i, w) } else { b });
        let (jmin, wmin) = omega
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| u[i] > 0.0)
            .fold((0, f64::INFINITY), |b, (i, w)| if w < b.1 { (i, w) } else { b });
        let up = wmax / (d + 1.0) - 1.0;
        let down = 1.0 - wmin / (d + 1.0);
        if up <= tol && down <= tol {
            converged = true;
            break;
        }
        let (j, step) = if up >= down {
            (jmax, (wmax - d - 1.0) / ((d + 1.0) * (wmax - 1.0)))
        } else {
            let full = (wmin - d - 1.0) / ((d + 1.0) * (wmin - 1.0));
            let floor = -u[jmin] / (1.0 - u[jmin]);
            (jmin, full.max(floor))
        };
        for w in u.iter_mut() {
            *w *= 1.0 - step;
        }
        u[j] += step;
        if u[j] < 1e-300 {
            u[j] = 0.0;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "mvee did not reach tol {tol:e} within {MVEE_MAX_ITERS} iterations"
        )));
    }

    let mut c = Vector2::zeros();
    for (q, &w) in lifted.iter().zip(&u) {
        c += w * Vector2::new(q[0], q[1]);
    }
    let mut s = Matrix2::zeros();
    for (q, &w) in lifted.iter().zip(&u) {
        let v = Vector2::new(q[0], q[1]);
        s += w * v * v.transpose();
    }
    s -= c * c.transpose();
    let m = s
        .try_inverse()
        .ok_or_else(|| Error::DegenerateInput("scatter matrix is singular".into()))?
        / d;
    let mut ell = EnclosingEllipse {
        center: [c[0] + mean[0], c[1] + mean[1]],
        shape: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
    };
    let worst = points.iter().map(|&p| ell.level(p)).fold(0.0, f64::max);
    if worst > 1.0 {
        ell = ell.scaled(worst.sqrt());
    }
    Ok(ell)
}
