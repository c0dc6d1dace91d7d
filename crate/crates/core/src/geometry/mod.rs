//! Convex-geometry kernel: polygon and ellipsoid measures, enclosing-ellipse
//! certificates, and randomized convex polygons.

mod ellipsoid;
mod mvee;
mod polygon;
mod random;

pub use ellipsoid::{cuboid_perimeter, ellipse_perimeter_2d, ellipsoid_volume, Cuboid, Ellipsoid};
pub use mvee::{mvee, EnclosingEllipse, MVEE_MAX_ITERS, MVEE_TOL};
pub use polygon::{convex_hull, polygon_area_perimeter, ConvexPolygon2D, HalfPlane, SimplePolygon};
pub use random::random_convex_polygon;

/// A point in the plane.
pub type Point = [f64; 2];

/// Planar region that a grid solver can clip against.
///
/// `line_crossings(axis, level)` returns the sorted coordinates where the line
/// parallel to `axis` (0 = x, 1 = y) at the given level of the other coordinate
/// crosses the boundary. Consecutive pairs bound the interior intervals.
pub trait Region: Sync {
    fn bounds(&self) -> (Point, Point);
    fn line_crossings(&self, axis: usize, level: f64) -> Vec<f64>;
}

pub(crate) fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Shoelace area (signed, positive for counterclockwise order).
pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = v[i];
        let q = v[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s
}

pub(crate) fn boundary_length(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| dist(v[i], v[(i + 1) % n])).sum()
}

pub(crate) fn bounding_box(v: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in v {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Crossings of a closed polyline with an axis-parallel line, half-open rule on
/// the edge endpoints so that vertices on the line are counted once.
pub(crate) fn polyline_crossings(v: &[Point], axis: usize, level: f64) -> Vec<f64> {
    let other = 1 - axis;
    let n = v.len();
    let mut out = Vec::new();
    for i in 0..n {
        let p = v[i];
        let q = v[(i + 1) % n];
        let (pl, ql) = (p[other], q[other]);
        if (pl <= level && level < ql) || (ql <= level && level < pl) {
            let t = (level - pl) / (ql - pl);
            out.push(p[axis] + t * (q[axis] - p[axis]));
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}
