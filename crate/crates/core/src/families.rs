//! Parametric families approaching the extremal values of `F_q`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{alpha_q, f_q, ShapeMeasures};
use crate::geometry::{ConvexPolygon2D, SimplePolygon};
use crate::io::fmt_sig;
use crate::special::unit_ball_volume;
use crate::thin::{slab_f_q_asymptotic, thin_asymptotics, Base, Thickness, ThicknessProfile};
use crate::torsion::{
    k_constant, torsion_fd_polygon, torsion_fd_region, torsion_homogenized_radial, torsion_rectangle_series,
};

/// Radial nodes for perforation rows.
pub const PERFORATION_NODES: usize = 1024;
/// Cone rows solve at `inradius / CONE_CELLS_PER_INRADIUS`.
pub const CONE_CELLS_PER_INRADIUS: f64 = 128.0;
/// Wiggle boundaries carry at least this many vertices per period.
pub const WIGGLE_VERTICES_PER_PERIOD: usize = 64;
/// Grid points required across the narrowest wiggle period.
pub const WIGGLE_CELLS_PER_PERIOD: f64 = 16.0;

/// One row of a sweep. `reference` is the theoretical `F_q` value the row is
/// compared against (see each sweep for its meaning).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub family: String,
    pub parameter: f64,
    pub d: usize,
    pub q: f64,
    pub perimeter: f64,
    pub torsion: f64,
    pub volume: f64,
    pub f_q: f64,
    pub reference: f64,
    /// Torsion error estimate; zero for closed-form rows.
    #[serde(skip)]
    pub torsion_error: f64,
}

impl SweepRecord {
    fn new(family: &str, parameter: f64, q: f64, m: ShapeMeasures, reference: f64) -> Self {
        Self {
            family: family.to_string(),
            parameter,
            d: m.d,
            q,
            perimeter: m.perimeter,
            torsion: m.torsion,
            volume: m.volume,
            f_q: f_q(&m, q),
            reference,
            torsion_error: m.torsion_error,
        }
    }

    pub fn measures(&self) -> Result<ShapeMeasures> {
        ShapeMeasures::new(self.d, self.perimeter, self.torsion, self.volume, self.torsion_error)
    }

    pub fn csv_header() -> &'static str {
        "family,parameter,d,q,perimeter,torsion,volume,f_q,reference"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.family,
            fmt_sig(self.parameter),
            self.d,
            fmt_sig(self.q),
            fmt_sig(self.perimeter),
            fmt_sig(self.torsion),
            fmt_sig(self.volume),
            fmt_sig(self.f_q),
            fmt_sig(self.reference)
        )
    }
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRecord]) -> std::io::Result<()> {
    writeln!(w, "{}", SweepRecord::csv_header())?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("q must be positive, got {q}")))
    }
}

fn check_decreasing(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a nonempty list of positive values"
        )));
    }
    if xs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument(format!("{name} must be strictly decreasing")));
    }
    Ok(())
}

fn check_increasing(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a nonempty increasing list"
        )));
    }
    Ok(())
}

/// Slabs `A × (-ε/2, ε/2)` over the unit cube `A = [0,1]^{d-1}`. In the plane
/// the torsion comes from the rectangle series; for `d >= 3` from the thin
/// asymptotics `ε³/12`, with exact `P` and `|Ω|`.
pub fn sweep_slab(q: f64, d: usize, eps_list: &[f64]) -> Result<Vec<SweepRecord>> {
    check_q(q)?;
    check_decreasing("eps list", eps_list)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {d}")));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let perimeter = 2.0 + eps * 2.0 * (d as f64 - 1.0);
            let torsion = if d == 2 {
                torsion_rectangle_series(1.0, eps)
            } else {
                eps.powi(3) / 12.0
            };
            let m = ShapeMeasures::new(d, perimeter, torsion, eps, 0.0)?;
            Ok(SweepRecord::new("slab", eps, q, m, slab_f_q_asymptotic(q, d, 1.0, eps)))
        })
        .collect()
}

/// Star-shaped polygon with boundary `r(θ) = 1 + amplitude·sin(nθ)`.
pub fn wiggle_polygon(n: u32, amplitude: f64) -> Result<SimplePolygon> {
    let m = (WIGGLE_VERTICES_PER_PERIOD * n as usize).max(512);
    let verts = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            let r = 1.0 + amplitude * (f64::from(n) * t).sin();
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    SimplePolygon::new(verts)
}

/// Largest grid spacing accepted for wiggle frequency `n`.
pub fn wiggle_max_grid(n: u32, amplitude: f64) -> f64 {
    if n == 0 {
        return 1.0 / 64.0;
    }
    2.0 * PI * (1.0 - amplitude) / (f64::from(n) * WIGGLE_CELLS_PER_PERIOD)
}

/// Wiggled disks solved by finite differences at finest spacing `grid`.
/// `reference` is the disk value of `F_q`.
pub fn sweep_wiggle(n_list: &[u32], amplitude: f64, q: f64, grid: f64) -> Result<Vec<SweepRecord>> {
    check_q(q)?;
    if !(amplitude > 0.0 && amplitude <= 0.3) {
        return Err(Error::InvalidArgument(format!(
            "amplitude must lie in (0, 0.3], got {amplitude}"
        )));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "wiggle counts must be a nonempty increasing list".into(),
        ));
    }
    if !(grid > 0.0) {
        return Err(Error::InvalidArgument(format!("grid must be positive, got {grid}")));
    }
    let n_max = *n_list.last().expect("nonempty");
    let needed = wiggle_max_grid(n_max, amplitude);
    if grid > needed {
        return Err(Error::Resolution {
            message: format!("grid {grid:e} cannot resolve {n_max} wiggles; need at most {needed:e}"),
            required_h: needed,
        });
    }
    let disk = crate::functionals::f_q_ball(q, 2);
    n_list
        .par_iter()
        .map(|&n| {
            let poly = wiggle_polygon(n, amplitude)?;
            let sol = torsion_fd_region(&poly, 2.0 * grid, 1)?;
            let m = ShapeMeasures::new(2, poly.perimeter(), sol.torsion, poly.area(), sol.error_estimate)?;
            Ok(SweepRecord::new("wiggle", f64::from(n), q, m, disk))
        })
        .collect()
}

/// Homogenized limits of perforated balls: `P = P(B_1)`, `|Ω| = |B_1|`,
/// torsion of `-Δu + K_c u = 1`. `reference` is `F_q` with the torsion
/// replaced by its bound `ω_d / K_c`.
pub fn sweep_perforation(d: usize, c_list: &[f64], q: f64) -> Result<Vec<SweepRecord>> {
    check_q(q)?;
    check_increasing("c list", c_list)?;
    if c_list[0] <= 0.0 {
        return Err(Error::InvalidArgument("perforation constants must be positive".into()));
    }
    let w = unit_ball_volume(d);
    let perimeter = d as f64 * w;
    c_list
        .par_iter()
        .map(|&c| {
            let k = k_constant(d, c)?;
            let prof = torsion_homogenized_radial(d, k, PERFORATION_NODES)?;
            let m = ShapeMeasures::new(d, perimeter, prof.torsion, w, 0.0)?;
            let reference = perimeter * (w / k).powf(q) / w.powf(alpha_q(q, d));
            Ok(SweepRecord::new("perforation", c, q, m, reference))
        })
        .collect()
}

/// Thin cones `{0 < t < ε(1 - |s|)}` over the unit ball of `R^{d-1}`.
/// In the plane this is the triangle `(-1,0), (1,0), (0,ε)` solved by finite
/// differences at `inradius / 128`; for `d >= 3` rows use the thin
/// asymptotics of the tent. `reference` is the thin-limit `F_q` at the same
/// `ε`, which for `q = 1/2` is the conjectured supremum.
pub fn sweep_cone(d: usize, q: f64, eps_list: &[f64]) -> Result<Vec<SweepRecord>> {
    check_q(q)?;
    check_decreasing("eps list", eps_list)?;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {d}")));
    }
    let tent = ThicknessProfile::new(Base::Ball { n: d - 1 }, Thickness::Tent)?;
    let thin = thin_asymptotics(&tent)?;
    let alpha = alpha_q(q, d);
    let reference = |eps: f64| {
        thin.perimeter_limit * (eps.powi(3) * thin.torsion_coeff).powf(q) / (eps * thin.volume_coeff).powf(alpha)
    };
    eps_list
        .par_iter()
        .map(|&eps| {
            let m = if d == 2 {
                let tri = ConvexPolygon2D::new(vec![[-1.0, 0.0], [1.0, 0.0], [0.0, eps]])?;
                let (_, r) = tri.inradius();
                let sol = torsion_fd_polygon(&tri, 2.0 * r / CONE_CELLS_PER_INRADIUS, 1)?;
                ShapeMeasures::new(2, tri.perimeter(), sol.torsion, tri.area(), sol.error_estimate)?
            } else {
                ShapeMeasures::new(
                    d,
                    thin.perimeter_limit,
                    eps.powi(3) * thin.torsion_coeff,
                    eps * thin.volume_coeff,
                    0.0,
                )?
            };
            Ok(SweepRecord::new("cone", eps, q, m, reference(eps)))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x` over the three smallest `x`,
/// with the root-mean-square residual.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least two matching points".into(),
        ));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("slope fit needs positive data".into()));
    }
    let mut pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(3);
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("slope fit needs distinct abscissae".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Ok((slope, rms))
}

/// [`loglog_slope`] of `f_q` against the sweep parameter.
pub fn sweep_slope(rows: &[SweepRecord]) -> Result<(f64, f64)> {
    let x: Vec<f64> = rows.iter().map(|r| r.parameter).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.f_q).collect();
    loglog_slope(&x, &y)
}
