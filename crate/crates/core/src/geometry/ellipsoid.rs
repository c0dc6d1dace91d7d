use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::special::unit_ball_volume;

/// Axis-aligned ellipsoid `Σ (x_i - c_i)² / a_i² < 1` in R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    a: Vec<f64>,
    center: Vec<f64>,
}

impl Ellipsoid {
    /// Ellipsoid centered at the origin with semi-axes `a`.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        let d = a.len();
        Self::with_center(a, vec![0.0; d])
    }

    pub fn with_center(a: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "ellipsoid dimension must be at least 2, got {}",
                a.len()
            )));
        }
        if center.len() != a.len() {
            return Err(Error::InvalidShape(
                "center and semi-axes have different dimensions".into(),
            ));
        }
        if let Some(x) = a.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidShape(format!("semi-axes must be positive, got {x}")));
        }
        Ok(Self { a, center })
    }

    pub fn ball(d: usize, r: f64) -> Result<Self> {
        Self::new(vec![r; d])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.a
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.a.iter().product::<f64>()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::with_center(
            self.a.iter().map(|x| t * x).collect(),
            self.center.iter().map(|x| t * x).collect(),
        )
    }

    /// The bounding box `∏ ]-a_i, a_i[`.
    pub fn bounding_cuboid(&self) -> Cuboid {
        Cuboid {
            half_extents: self.a.clone(),
        }
    }
}

/// `ω_d ∏ a_i`.
pub fn ellipsoid_volume(e: &Ellipsoid) -> f64 {
    e.volume()
}

/// Arc length of a planar ellipse by adaptive quadrature (relative tolerance 1e-10).
pub fn ellipse_perimeter_2d(e: &Ellipsoid) -> Result<f64> {
    if e.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "ellipse perimeter needs d = 2, got d = {}",
            e.dim()
        )));
    }
    let (a, b) = (e.a[0], e.a[1]);
    let speed = |t: f64| {
        let (s, c) = t.sin_cos();
        (a * a * s * s + b * b * c * c).sqrt()
    };
    // Quarter arc; the integrand is bounded below by min(a, b).
    let tol = 1e-10 * a.min(b) * std::f64::consts::FRAC_PI_2 / 4.0;
    Ok(4.0 * adaptive_simpson(&speed, 0.0, std::f64::consts::FRAC_PI_2, tol))
}

/// Box `∏ ]-h_i, h_i[` with half-extents `h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cuboid {
    half_extents: Vec<f64>,
}

impl Cuboid {
    pub fn new(half_extents: Vec<f64>) -> Result<Self> {
        if half_extents.is_empty() || half_extents.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidShape("cuboid half-extents must be positive".into()));
        }
        Ok(Self { half_extents })
    }

    pub fn dim(&self) -> usize {
        self.half_extents.len()
    }

    pub fn half_extents(&self) -> &[f64] {
        &self.half_extents
    }

    pub fn volume(&self) -> f64 {
        self.half_extents.iter().map(|h| 2.0 * h).product()
    }
}

/// Surface measure `2^d (Σ 1/a_i) ∏ a_i` of the cuboid boundary.
pub fn cuboid_perimeter(q: &Cuboid) -> f64 {
    let d = q.dim() as i32;
    let inv: f64 = q.half_extents.iter().map(|a| 1.0 / a).sum();
    let prod: f64 = q.half_extents.iter().product();
    2f64.powi(d) * inv * prod
}
