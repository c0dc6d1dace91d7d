//! Five-point finite differences for `-Δu = 1`, `u = 0` on the boundary of a
//! planar region, with cut-cell boundary arms.
//!
//! Nodes sit on the lattice `h·Z²`. A node is an unknown when it lies strictly
//! inside the region along both its grid row and its grid column. An arm that
//! leaves the region is shortened to the boundary crossing at `θh`
//! (`0 < θ <= 1`) and contributes `u_i / (θ h²)`, the symmetric flux form of
//! the Shortley–Weller arm, so the matrix stays SPD and CG applies.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon2D, Point, Region};

/// Relative residual at which conjugate gradients stop.
pub const CG_REL_TOL: f64 = 1e-10;
/// Largest lattice (bounding-box nodes) a single level may allocate.
pub const MAX_GRID_NODES: usize = 40_000_000;

const NONE: u32 = u32::MAX;
const THETA_MIN: f64 = 1e-8;
const MIC_TAU: f64 = 0.97;
const MIC_SIGMA: f64 = 0.25;

/// Summary of one grid level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLevel {
    pub h: f64,
    pub unknowns: usize,
    pub torsion: f64,
    pub cg_iterations: usize,
}

/// Discrete torsion function on the finest grid plus the refinement history.
#[derive(Debug, Clone)]
pub struct TorsionSolution {
    pub grid_spacing: f64,
    /// Lattice indices `(i, j)` of the unknowns, sorted by `(j, i)`.
    nodes: Vec<[i64; 2]>,
    values: Vec<f64>,
    /// `h² Σ u_i` on the finest grid.
    pub torsion: f64,
    /// Richardson estimate `|T_h - T_{2h}| / 3` from the two finest levels.
    pub error_estimate: f64,
    /// Observed convergence order, available with three levels.
    pub observed_order: Option<f64>,
    /// Every level solved, coarsest first.
    pub levels: Vec<GridLevel>,
}

impl TorsionSolution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> &[[i64; 2]] {
        &self.nodes
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let h = self.grid_spacing;
        self.nodes.iter().map(move |n| [n[0] as f64 * h, n[1] as f64 * h])
    }

    /// Value at the lattice node nearest to `p`, if that node is an unknown.
    pub fn value_at(&self, p: Point) -> Option<f64> {
        let h = self.grid_spacing;
        let key = [(p[0] / h).round() as i64, (p[1] / h).round() as i64];
        self.nodes
            .binary_search_by(|n| (n[1], n[0]).cmp(&(key[1], key[0])))
            .ok()
            .map(|k| self.values[k])
    }

    /// Richardson-extrapolated torsion, assuming second order.
    pub fn extrapolated(&self) -> f64 {
        match self.levels.as_slice() {
            [.., coarse, fine] if coarse.h > fine.h => fine.torsion + (fine.torsion - coarse.torsion) / 3.0,
            _ => self.torsion,
        }
    }

    /// CSV with header `x,y,u`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,u")?;
        for (p, u) in self.points().zip(&self.values) {
            writeln!(
                w,
                "{},{},{}",
                crate::io::fmt_sig(p[0]),
                crate::io::fmt_sig(p[1]),
                crate::io::fmt_sig(*u)
            )?;
        }
        Ok(())
    }
}

struct Level {
    summary: GridLevel,
    nodes: Vec<[i64; 2]>,
    values: Vec<f64>,
}

/// Finite-difference torsion of a convex polygon.
///
/// `h` must be below a quarter of the inradius. `refine` (0..=2) adds that many
/// halvings of `h`; with `refine = 0` an auxiliary `2h` solve supplies the
/// error estimate.
pub fn torsion_fd_polygon(poly: &ConvexPolygon2D, h: f64, refine: u32) -> Result<TorsionSolution> {
    let (_, r) = poly.inradius();
    if !(h > 0.0) || h >= r / 4.0 {
        return Err(Error::Resolution {
            message: format!("grid spacing {h} is not below inradius/4 = {:.6}", r / 4.0),
            required_h: r / 4.0,
        });
    }
    torsion_fd_region(poly, h, refine)
}

/// Finite-difference torsion of any [`Region`]; no inradius check.
pub fn torsion_fd_region<R: Region + ?Sized>(region: &R, h: f64, refine: u32) -> Result<TorsionSolution> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    if refine > 2 {
        return Err(Error::InvalidArgument(format!(
            "refine must be 0, 1 or 2, got {refine}"
        )));
    }
    let mut levels = Vec::new();
    if refine == 0 {
        // the estimate is optional at 2h; a too-coarse auxiliary grid just
        // leaves a pessimistic estimate
        if let Ok(aux) = solve_level(region, 2.0 * h) {
            levels.push(aux);
        }
    }
    for k in 0..=refine {
        levels.push(solve_level(region, h / f64::from(1u32 << k))?);
    }

    let summaries: Vec<GridLevel> = levels.iter().map(|l| l.summary).collect();
    let fine = levels.pop().expect("at least one level");
    let error_estimate = match summaries.as_slice() {
        [.., c, f] => (f.torsion - c.torsion).abs() / 3.0,
        _ => fine.summary.torsion,
    };
    let observed_order = match summaries.as_slice() {
        [.., a, b, c] => {
            let ratio = (a.torsion - b.torsion) / (b.torsion - c.torsion);
            (ratio > 0.0).then(|| ratio.log2())
        }
        _ => None,
    };
    Ok(TorsionSolution {
        grid_spacing: fine.summary.h,
        nodes: fine.nodes,
        values: fine.values,
        torsion: fine.summary.torsion,
        error_estimate,
        observed_order,
        levels: summaries,
    })
}

/// Distances from `x` to the enclosing pair of crossings, if `x` is inside.
fn interval_gaps(crossings: &[f64], x: f64) -> Option<(f64, f64)> {
    let k = crossings.partition_point(|&c| c < x);
    if k % 2 == 1 && k < crossings.len() {
        Some((x - crossings[k - 1], crossings[k] - x))
    } else {
        None
    }
}

fn solve_level<R: Region + ?Sized>(region: &R, h: f64) -> Result<Level> {
    let (lo, hi) = region.bounds();
    let i0 = (lo[0] / h).ceil() as i64;
    let i1 = (hi[0] / h).floor() as i64;
    let j0 = (lo[1] / h).ceil() as i64;
    let j1 = (hi[1] / h).floor() as i64;
    let no_nodes = || Error::Resolution {
        message: format!("grid spacing {h:e} leaves no interior node"),
        required_h: h / 2.0,
    };
    if i1 < i0 || j1 < j0 {
        return Err(no_nodes());
    }
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    if nx.saturating_mul(ny) > MAX_GRID_NODES {
        return Err(Error::Resolution {
            message: format!("grid of {nx}×{ny} nodes exceeds the budget of {MAX_GRID_NODES}"),
            required_h: h,
        });
    }
    let xs: Vec<f64> = (0..nx).map(|i| (i0 + i as i64) as f64 * h).collect();
    let ys: Vec<f64> = (0..ny).map(|j| (j0 + j as i64) as f64 * h).collect();
    let rows: Vec<Vec<f64>> = ys.iter().map(|&y| region.line_crossings(0, y)).collect();
    let cols: Vec<Vec<f64>> = xs.iter().map(|&x| region.line_crossings(1, x)).collect();
    let on_boundary = 1e-9 * h;

    let mut index = vec![NONE; nx * ny];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let inside = |gaps: Option<(f64, f64)>| gaps.is_some_and(|(a, b)| a > on_boundary && b > on_boundary);
            if inside(interval_gaps(&rows[j], xs[i])) && inside(interval_gaps(&cols[i], ys[j])) {
                index[j * nx + i] = nodes.len() as u32;
                nodes.push([i0 + i as i64, j0 + j as i64]);
            }
        }
    }
    if nodes.is_empty() {
        return Err(no_nodes());
    }

    // arms: left, right, down, up
    let n = nodes.len();
    let mut diag = vec![0.0; n];
    let mut nbr = vec![[NONE; 4]; n];
    for (k, node) in nodes.iter().enumerate() {
        let i = (node[0] - i0) as usize;
        let j = (node[1] - j0) as usize;
        let (left, right) = interval_gaps(&rows[j], xs[i]).expect("interior node");
        let (down, up) = interval_gaps(&cols[i], ys[j]).expect("interior node");
        let candidates = [
            (i > 0).then(|| index[j * nx + i - 1]),
            (i + 1 < nx).then(|| index[j * nx + i + 1]),
            (j > 0).then(|| index[(j - 1) * nx + i]),
            (j + 1 < ny).then(|| index[(j + 1) * nx + i]),
        ];
        let gaps = [left, right, down, up];
        for arm in 0..4 {
            match candidates[arm] {
                Some(m) if m != NONE => {
                    nbr[k][arm] = m;
                    diag[k] += 1.0;
                }
                _ => {
                    let theta = (gaps[arm] / h).clamp(THETA_MIN, 1.0);
                    diag[k] += 1.0 / theta;
                }
            }
        }
    }

    let op = Stencil { diag, nbr };
    let rhs = vec![h * h; n];
    let (values, iterations) = op.pcg(&rhs, CG_REL_TOL, 20 * (nx + ny) + 1000)?;
    let torsion = h * h * values.iter().sum::<f64>();
    Ok(Level {
        summary: GridLevel {
            h,
            unknowns: n,
            torsion,
            cg_iterations: iterations,
        },
        nodes,
        values,
    })
}

/// `h²`-scaled operator: `(A u)_k = diag_k u_k - Σ_{arms} u_nbr`.
struct Stencil {
    diag: Vec<f64>,
    nbr: Vec<[u32; 4]>,
}

impl Stencil {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (k, out) in y.iter_mut().enumerate() {
            let mut s = self.diag[k] * x[k];
            for &m in &self.nbr[k] {
                if m != NONE {
                    s -= x[m as usize];
                }
            }
            *out = s;
        }
    }

    /// Modified incomplete Cholesky factor (inverse diagonal) in natural order.
    fn mic0(&self) -> Vec<f64> {
        let n = self.diag.len();
        let mut p = vec![0.0; n];
        for k in 0..n {
            let mut e = self.diag[k];
            let [left, _, down, _] = self.nbr[k];
            if left != NONE {
                let l = left as usize;
                let pl = p[l] * p[l];
                e -= pl;
                if self.nbr[l][3] != NONE {
                    e -= MIC_TAU * pl;
                }
            }
            if down != NONE {
                let d = down as usize;
                let pd = p[d] * p[d];
                e -= pd;
                if self.nbr[d][1] != NONE {
                    e -= MIC_TAU * pd;
                }
            }
            if e < MIC_SIGMA * self.diag[k] {
                e = self.diag[k];
            }
            p[k] = 1.0 / e.sqrt();
        }
        p
    }

    fn precondition(&self, p: &[f64], r: &[f64], z: &mut [f64]) {
        let n = r.len();
        // forward: L q = r, stored in z
        for k in 0..n {
            let mut t = r[k];
            let [left, _, down, _] = self.nbr[k];
            if left != NONE {
                let l = left as usize;
                t += p[l] * z[l];
            }
            if down != NONE {
                let d = down as usize;
                t += p[d] * z[d];
            }
            z[k] = t * p[k];
        }
        // backward: Lᵀ z = q
        for k in (0..n).rev() {
            let mut t = z[k];
            let [_, right, _, up] = self.nbr[k];
            if right != NONE {
                t += p[k] * z[right as usize];
            }
            if up != NONE {
                t += p[k] * z[up as usize];
            }
            z[k] = t * p[k];
        }
    }

    fn pcg(&self, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
        let n = b.len();
        let pc = self.mic0();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        self.precondition(&pc, &r, &mut z);
        let mut s = z.clone();
        let mut q = vec![0.0; n];
        let bnorm = dot(b, b).sqrt();
        let mut rz = dot(&r, &z);
        for it in 1..=max_iter {
            self.apply(&s, &mut q);
            let sq = dot(&s, &q);
            if !(sq > 0.0) {
                return Err(Error::Solver(format!(
                    "operator lost positive definiteness at iteration {it}"
                )));
            }
            let alpha = rz / sq;
            for k in 0..n {
                x[k] += alpha * s[k];
                r[k] -= alpha * q[k];
            }
            if dot(&r, &r).sqrt() <= tol * bnorm {
                return Ok((x, it));
            }
            self.precondition(&pc, &r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                s[k] = z[k] + beta * s[k];
            }
        }
        Err(Error::Solver(format!(
            "conjugate gradients did not reach relative residual {tol:e} in {max_iter} iterations"
        )))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplePolygon;
    use std::f64::consts::PI;

    #[test]
    fn square_interior_uses_plain_stencil() {
        // nodes on the boundary are excluded, all arms regular or θ = 1
        let sq = ConvexPolygon2D::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let sol = torsion_fd_region(&sq, 1.0 / 8.0, 0).unwrap();
        assert_eq!(sol.values().len(), 49);
        let exact = crate::torsion::torsion_rectangle_series(1.0, 1.0);
        assert!((sol.torsion - exact).abs() / exact < 0.05);
    }

    #[test]
    fn solution_is_nonnegative_and_symmetric() {
        let hex = ConvexPolygon2D::regular(6, 1.0).unwrap();
        let sol = torsion_fd_region(&hex, 1.0 / 32.0, 0).unwrap();
        assert!(sol.values().iter().all(|&u| u >= 0.0));
        let a = sol.value_at([0.25, 0.125]).unwrap();
        let b = sol.value_at([-0.25, -0.125]).unwrap();
        assert!((a - b).abs() < 1e-9);
        let s: f64 = sol.values().iter().sum::<f64>() * sol.grid_spacing.powi(2);
        assert!((s - sol.torsion).abs() <= 1e-14 * s);
    }

    #[test]
    fn coarse_disk_is_close() {
        let disk = ConvexPolygon2D::regular(256, 1.0).unwrap();
        let sol = torsion_fd_region(&disk, 1.0 / 64.0, 1).unwrap();
        assert!((sol.torsion - PI / 8.0).abs() / (PI / 8.0) < 2e-3);
        assert_eq!(sol.levels.len(), 2);
        assert!(sol.error_estimate > 0.0);
    }

    #[test]
    fn nonconvex_region() {
        // L-shape: three unit squares; torsion lies between one square and three squares
        let l = SimplePolygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        let sol = torsion_fd_region(&l, 1.0 / 32.0, 0).unwrap();
        let sq = crate::torsion::torsion_rectangle_series(1.0, 1.0);
        let rect = crate::torsion::torsion_rectangle_series(2.0, 1.0);
        assert!(sol.torsion > rect && sol.torsion < 3.0 * sq + 2.0 * rect);
    }

    #[test]
    fn too_coarse_is_a_resolution_error() {
        let tri = ConvexPolygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.2]]).unwrap();
        assert!(matches!(
            torsion_fd_polygon(&tri, 0.1, 0),
            Err(Error::Resolution { .. })
        ));
        let tiny = ConvexPolygon2D::rectangle(0.01, 0.01, 0.02, 0.02).unwrap();
        assert!(matches!(
            torsion_fd_region(&tiny, 0.5, 0),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn rejects_bad_refine() {
        let sq = ConvexPolygon2D::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(torsion_fd_region(&sq, 0.1, 3).is_err());
        assert!(torsion_fd_region(&sq, -0.1, 0).is_err());
    }
}
