//! Thin-domain limits: sets `{(s, t) : s ∈ A, 0 < t < ε h(s)}` as `ε → 0`.
//!
//! On a ball base the thickness is radial; evaluators are called at
//! `(r, 0, ..., 0)` during quadrature.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::functionals::{borell_constant, BoundReport};
use crate::geometry::ConvexPolygon2D;
use crate::quad::adaptive_simpson;
use crate::special::{unit_ball_volume, unit_sphere_area};

const QUAD_TOL: f64 = 1e-13;
const POLY_REL_TOL: f64 = 1e-6;
const CONCAVITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Base {
    Interval {
        a: f64,
        b: f64,
    },
    /// Unit ball of `R^n`.
    Ball {
        n: usize,
    },
    Polygon(ConvexPolygon2D),
}

impl Base {
    /// Dimension of the base, `N = d - 1`.
    pub fn dim(&self) -> usize {
        match self {
            Base::Interval { .. } => 1,
            Base::Ball { n } => *n,
            Base::Polygon(_) => 2,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Base::Interval { a, b } => b - a,
            Base::Ball { n } => unit_ball_volume(*n),
            Base::Polygon(p) => p.area(),
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Thickness {
    Const(f64),
    /// Peak 1 at the center, zero on the boundary: `1 - |s|` on balls, the
    /// gauge cone over the centroid on polygons.
    Tent,
    /// Piecewise-linear samples; abscissae are radii on a ball base.
    Samples {
        x: Vec<f64>,
        y: Vec<f64>,
    },
    Custom(Evaluator),
}

impl fmt::Debug for Thickness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Thickness::Const(c) => f.debug_tuple("Const").field(c).finish(),
            Thickness::Tent => f.write_str("Tent"),
            Thickness::Samples { x, y } => f.debug_struct("Samples").field("x", x).field("y", y).finish(),
            Thickness::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThicknessProfile {
    base: Base,
    h: Thickness,
    gauge: Option<Gauge>,
}

#[derive(Debug, Clone)]
struct Gauge {
    center: [f64; 2],
    // rows (n / (offset - n·c))
    rows: Vec<[f64; 2]>,
}

impl Gauge {
    fn new(p: &ConvexPolygon2D) -> Self {
        let c = p.centroid();
        let rows = p
            .half_planes()
            .iter()
            .map(|hp| {
                let s = hp.offset - (hp.normal[0] * c[0] + hp.normal[1] * c[1]);
                [hp.normal[0] / s, hp.normal[1] / s]
            })
            .collect();
        Self { center: c, rows }
    }

    fn eval(&self, p: [f64; 2]) -> f64 {
        let (x, y) = (p[0] - self.center[0], p[1] - self.center[1]);
        self.rows
            .iter()
            .map(|r| r[0] * x + r[1] * y)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl ThicknessProfile {
    pub fn new(base: Base, h: Thickness) -> Result<Self> {
        match &base {
            Base::Interval { a, b } if !(a.is_finite() && b.is_finite() && b > a) => {
                return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
            }
            Base::Ball { n } if *n < 1 => {
                return Err(Error::InvalidArgument("ball base needs N >= 1".into()));
            }
            _ => {}
        }
        match &h {
            Thickness::Const(c) if !(*c >= 0.0 && c.is_finite()) => {
                return Err(Error::InvalidArgument(format!(
                    "thickness must be nonnegative, got {c}"
                )));
            }
            Thickness::Samples { x, y } => {
                if x.len() < 2 || x.len() != y.len() {
                    return Err(Error::InvalidArgument(
                        "samples need matching x and y with at least two points".into(),
                    ));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidArgument("sample abscissae must increase".into()));
                }
                if y.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::InvalidArgument("thickness samples must be nonnegative".into()));
                }
                let (lo, hi) = match &base {
                    Base::Interval { a, b } => (*a, *b),
                    Base::Ball { .. } => (0.0, 1.0),
                    Base::Polygon(_) => {
                        return Err(Error::InvalidArgument(
                            "sampled thickness is not supported on polygon bases".into(),
                        ))
                    }
                };
                let tol = 1e-12 * (hi - lo).abs().max(1.0);
                if (x[0] - lo).abs() > tol || (x[x.len() - 1] - hi).abs() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "samples must span [{lo}, {hi}], got [{}, {}]",
                        x[0],
                        x[x.len() - 1]
                    )));
                }
            }
            _ => {}
        }
        let gauge = match (&base, &h) {
            (Base::Polygon(p), Thickness::Tent) => Some(Gauge::new(p)),
            _ => None,
        };
        Ok(Self { base, h, gauge })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn thickness(&self) -> &Thickness {
        &self.h
    }

    /// Ambient dimension `d = N + 1`.
    pub fn d(&self) -> usize {
        self.base.dim() + 1
    }

    /// Thickness at a point of the base (length `N`).
    pub fn eval(&self, s: &[f64]) -> f64 {
        match &self.h {
            Thickness::Const(c) => *c,
            Thickness::Custom(f) => f(s),
            Thickness::Tent => match &self.base {
                Base::Interval { a, b } => {
                    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
                    (1.0 - (s[0] - m).abs() / r).max(0.0)
                }
                Base::Ball { .. } => (1.0 - norm(s)).max(0.0),
                Base::Polygon(_) => (1.0 - self.gauge.as_ref().expect("tent gauge").eval([s[0], s[1]])).max(0.0),
            },
            Thickness::Samples { x, y } => {
                let t = match self.base {
                    Base::Ball { .. } => norm(s),
                    _ => s[0],
                };
                interp(x, y, t)
            }
        }
    }

    fn radial(&self, r: f64) -> f64 {
        let mut s = vec![0.0; self.base.dim()];
        s[0] = r;
        self.eval(&s)
    }

    /// `(∫h, ∫h³)` over the base.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let (m1, m3) = match &self.base {
            Base::Interval { a, b } => match &self.h {
                Thickness::Samples { x, y } => exact_pl_moments(x, y),
                Thickness::Const(c) => ((b - a) * c, (b - a) * c.powi(3)),
                _ => {
                    let m = 0.5 * (a + b);
                    let f1 = |t: f64| self.eval(&[t]);
                    let f3 = |t: f64| self.eval(&[t]).powi(3);
                    (
                        adaptive_simpson(&f1, *a, m, QUAD_TOL) + adaptive_simpson(&f1, m, *b, QUAD_TOL),
                        adaptive_simpson(&f3, *a, m, QUAD_TOL) + adaptive_simpson(&f3, m, *b, QUAD_TOL),
                    )
                }
            },
            Base::Ball { n } => {
                let n = *n;
                let sphere = unit_sphere_area(n);
                let w = |r: f64| r.powi(n as i32 - 1);
                let knots: Vec<f64> = match &self.h {
                    Thickness::Samples { x, .. } => x.clone(),
                    _ => vec![0.0, 1.0],
                };
                let f1 = |r: f64| self.radial(r) * w(r);
                let f3 = |r: f64| self.radial(r).powi(3) * w(r);
                let (mut m1, mut m3) = (0.0, 0.0);
                for k in knots.windows(2) {
                    m1 += adaptive_simpson(&f1, k[0], k[1], QUAD_TOL);
                    m3 += adaptive_simpson(&f3, k[0], k[1], QUAD_TOL);
                }
                (sphere * m1, sphere * m3)
            }
            Base::Polygon(p) => polygon_moments(p, |q| self.eval(&q)),
        };
        if !(m1 > 0.0) {
            return Err(Error::DegenerateInput("thickness profile has zero integral".into()));
        }
        Ok((m1, m3))
    }
}

fn norm(s: &[f64]) -> f64 {
    s.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn interp(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    if t <= x[0] {
        return y[0];
    }
    if t >= x[n - 1] {
        return y[n - 1];
    }
    let i = x.partition_point(|&v| v <= t).min(n - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    let u = (t - x0) / (x1 - x0);
    y[i - 1] + u * (y[i] - y[i - 1])
}

// Exact ∫y and ∫y³ of a piecewise-linear function.
fn exact_pl_moments(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m3 = 0.0;
    for i in 1..x.len() {
        let (l, a, b) = (x[i] - x[i - 1], y[i - 1], y[i]);
        m1 += 0.5 * l * (a + b);
        m3 += 0.25 * l * (a + b) * (a * a + b * b);
    }
    (m1, m3)
}

// Centroid fan, each triangle split into m² similar pieces, each integrated
// with the 7-point degree-5 Radon rule; m doubles until both moments settle.
// Const and tent profiles are polynomial of degree ≤ 3 on every piece, so
// the first level is already exact for them.
fn polygon_moments(p: &ConvexPolygon2D, h: impl Fn([f64; 2]) -> f64) -> (f64, f64) {
    let s15 = 15f64.sqrt();
    let (a1, a2) = ((6.0 - s15) / 21.0, (6.0 + s15) / 21.0);
    let (w1, w2) = ((155.0 - s15) / 1200.0, (155.0 + s15) / 1200.0);
    let rule: [(f64, f64, f64); 7] = [
        (1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0),
        (a1, a1, w1),
        (1.0 - 2.0 * a1, a1, w1),
        (a1, 1.0 - 2.0 * a1, w1),
        (a2, a2, w2),
        (1.0 - 2.0 * a2, a2, w2),
        (a2, 1.0 - 2.0 * a2, w2),
    ];
    let c = p.centroid();
    let v = p.vertices();
    let eval = |m: usize| {
        let (mut m1, mut m3) = (0.0, 0.0);
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            let e1 = [(a[0] - c[0]) / m as f64, (a[1] - c[1]) / m as f64];
            let e2 = [(b[0] - c[0]) / m as f64, (b[1] - c[1]) / m as f64];
            let area = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]).abs();
            let at = |i: f64, j: f64| [c[0] + i * e1[0] + j * e2[0], c[1] + i * e1[1] + j * e2[1]];
            let mut add = |q: [f64; 2], w: f64| {
                let hv = h(q);
                m1 += area * w * hv;
                m3 += area * w * hv.powi(3);
            };
            for i in 0..m {
                for j in 0..(m - i) {
                    let (fi, fj) = (i as f64, j as f64);
                    for &(x, y, w) in &rule {
                        add(at(fi + x, fj + y), w);
                        if i + j + 1 < m {
                            add(at(fi + 1.0 - x, fj + 1.0 - y), w);
                        }
                    }
                }
            }
        }
        (m1, m3)
    };
    let mut m = 1;
    let mut prev = eval(m);
    loop {
        m *= 2;
        let cur = eval(m);
        let settled = |a: f64, b: f64| (a - b).abs() <= POLY_REL_TOL * 0.1 * b.abs();
        if (settled(prev.0, cur.0) && settled(prev.1, cur.1)) || m >= 4096 {
            return cur;
        }
        prev = cur;
    }
}

/// Coefficients of `P ≈ perimeter_limit`, `T ≈ ε³ torsion_coeff`,
/// `|Ω| = ε volume_coeff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinAsymptotics {
    pub perimeter_limit: f64,
    pub torsion_coeff: f64,
    pub volume_coeff: f64,
}

pub fn thin_asymptotics(p: &ThicknessProfile) -> Result<ThinAsymptotics> {
    let (m1, m3) = p.moments()?;
    Ok(ThinAsymptotics {
        perimeter_limit: 2.0 * p.base.measure(),
        torsion_coeff: m3 / 12.0,
        volume_coeff: m1,
    })
}

/// `3^{-1/2} (⨍h³ / (⨍h)³)^{1/2}`, the `ε → 0` limit of `F_{1/2}`.
pub fn thin_limit_f_half(p: &ThicknessProfile) -> Result<f64> {
    let (m1, m3) = p.moments()?;
    let a = p.base.measure();
    Ok(3f64.powf(-0.5) * ((m3 / a) / (m1 / a).powi(3)).sqrt())
}

/// `F_q` of a thin slab `A × (-ε/2, ε/2)` to leading order in `ε`.
pub fn slab_f_q_asymptotic(q: f64, d: usize, base_measure: f64, eps: f64) -> f64 {
    let df = d as f64;
    2.0 / (12f64.powf(q) * base_measure.powf((2.0 * q - 1.0) / df)) * eps.powf((2.0 * q - 1.0) * (df - 1.0) / df)
}

/// Concavity test. Piecewise-linear samples, constants and tents are
/// certified exactly. Custom evaluators get a randomized midpoint test on
/// `max(n_checks, 100)` pairs, which can only refute concavity.
pub fn is_concave(p: &ThicknessProfile, n_checks: usize, seed: u64) -> bool {
    match &p.h {
        Thickness::Const(_) | Thickness::Tent => true,
        Thickness::Samples { x, y } => {
            let slopes: Vec<f64> = (1..x.len()).map(|i| (y[i] - y[i - 1]) / (x[i] - x[i - 1])).collect();
            let scale = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
            let mono = slopes.windows(2).all(|w| w[1] <= w[0] + CONCAVITY_SLACK * scale);
            // a radial profile must also not rise off the center
            let center = !matches!(p.base, Base::Ball { .. }) || slopes[0] <= CONCAVITY_SLACK * scale;
            mono && center
        }
        Thickness::Custom(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n_checks.max(100)).all(|_| {
                let a = sample_point(&p.base, &mut rng);
                let b = sample_point(&p.base, &mut rng);
                let m: Vec<f64> = a.iter().zip(&b).map(|(u, v)| 0.5 * (u + v)).collect();
                p.eval(&m) >= 0.5 * (p.eval(&a) + p.eval(&b)) - CONCAVITY_SLACK
            })
        }
    }
}

fn sample_point(base: &Base, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match base {
        Base::Interval { a, b } => vec![rng.random_range(*a..=*b)],
        Base::Ball { n } => {
            let g: Vec<f64> = (0..*n).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm(&g).max(f64::MIN_POSITIVE);
            let r = rng.random::<f64>().powf(1.0 / *n as f64);
            g.iter().map(|v| v * r / len).collect()
        }
        Base::Polygon(poly) => {
            let v = poly.vertices();
            let (mut lo, mut hi) = (v[0], v[0]);
            for q in v {
                lo = [lo[0].min(q[0]), lo[1].min(q[1])];
                hi = [hi[0].max(q[0]), hi[1].max(q[1])];
            }
            loop {
                let q = [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])];
                if poly.contains(q) {
                    return q.to_vec();
                }
            }
        }
    }
}

/// Berwald's inequality `⨍h³ ≤ C_{1,3}³ (⨍h)³` with `C` taken at the base
/// dimension. Requires a concave profile.
pub fn borell_check(p: &ThicknessProfile) -> Result<BoundReport> {
    if !is_concave(p, 1000, 0) {
        return Err(Error::Precondition("thickness profile is not concave".into()));
    }
    let (m1, m3) = p.moments()?;
    let a = p.base.measure();
    let c = borell_constant(1.0, 3.0, p.base.dim())?;
    let bound = c.powi(3) * (m1 / a).powi(3);
    Ok(BoundReport::upper("borell", m3 / a, bound, 1e-9 * bound))
}

/// Random concave piecewise-linear profile with `n_pieces` pieces. On a ball
/// base the profile is radial and nonincreasing, vanishing at `r = 1` with
/// probability zero.
pub fn random_concave_profile(base: Base, n_pieces: usize, seed: u64) -> Result<ThicknessProfile> {
    let (lo, hi) = match base {
        Base::Interval { a, b } => (a, b),
        Base::Ball { .. } => (0.0, 1.0),
        Base::Polygon(_) => {
            return Err(Error::InvalidArgument(
                "random profiles need an interval or ball base".into(),
            ))
        }
    };
    let n = n_pieces.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n - 1).map(|_| rng.random_range(lo..hi)).collect();
    x.push(lo);
    x.push(hi);
    x.sort_by(|a, b| a.total_cmp(b));
    x.dedup();
    let radial = matches!(base, Base::Ball { .. });
    let mut slopes: Vec<f64> = (1..x.len())
        .map(|_| {
            let s: f64 = rng.sample(StandardNormal);
            if radial {
                -s.abs()
            } else {
                s
            }
        })
        .collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut y = vec![0.0];
    for i in 1..x.len() {
        y.push(y[i - 1] + slopes[i - 1] * (x[i] - x[i - 1]));
    }
    // concave, so the minimum sits at an endpoint
    let floor = y[0].min(y[y.len() - 1]);
    let lift = rng.random_range(0.0..1.0);
    for v in &mut y {
        *v = (*v - floor + lift).max(0.0);
    }
    ThicknessProfile::new(base, Thickness::Samples { x, y })
}
