use serde::{Deserialize, Serialize};

use super::{boundary_length, bounding_box, cross, dist, polyline_crossings, signed_area, Point, Region};
use crate::error::{Error, Result};

/// Outward half-plane `normal · x <= offset` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// Signed distance from `p` to the boundary line, positive inside.
    pub fn slack(&self, p: Point) -> f64 {
        self.offset - (self.normal[0] * p[0] + self.normal[1] * p[1])
    }
}

/// Planar convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct ConvexPolygon2D {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for ConvexPolygon2D {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ConvexPolygon2D> for Vec<Point> {
    fn from(p: ConvexPolygon2D) -> Self {
        p.vertices
    }
}

fn scale_of(v: &[Point]) -> f64 {
    let (lo, hi) = bounding_box(v);
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

fn check_vertices(v: &[Point]) -> Result<f64> {
    if v.len() < 3 {
        return Err(Error::InvalidShape(format!(
            "polygon needs at least 3 vertices, got {}",
            v.len()
        )));
    }
    if v.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::InvalidShape("non-finite vertex coordinate".into()));
    }
    let scale = scale_of(v);
    let n = v.len();
    for i in 0..n {
        if dist(v[i], v[(i + 1) % n]) <= 1e-12 * scale {
            return Err(Error::InvalidShape(format!(
                "vertices {i} and {} coincide",
                (i + 1) % n
            )));
        }
    }
    let area = signed_area(v);
    if area <= 0.0 {
        return Err(Error::InvalidShape(
            "polygon area is not positive (clockwise or degenerate)".into(),
        ));
    }
    Ok(scale)
}

impl ConvexPolygon2D {
    /// Validates counterclockwise convexity. Near-collinear consecutive vertices are
    /// rejected, not repaired.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let scale = check_vertices(&vertices)?;
        let n = vertices.len();
        let mut turning = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cr = cross(a, b, c);
            if cr <= 1e-12 * scale * scale {
                return Err(Error::InvalidShape(format!(
                    "vertex {} is reflex or collinear with its neighbours",
                    (i + 1) % n
                )));
            }
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            turning += cr.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidShape(
                "boundary winds more than once around the interior".into(),
            ));
        }
        Ok(Self { vertices })
    }

    /// Regular `n`-gon inscribed in the circle of `radius` about the origin.
    pub fn regular(n: usize, radius: f64) -> Result<Self> {
        let v = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                [radius * t.cos(), radius * t.sin()]
            })
            .collect();
        Self::new(v)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        boundary_length(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let v = &self.vertices;
        let n = v.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let p = v[i];
            let q = v[(i + 1) % n];
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        let a6 = 6.0 * self.area();
        [cx / a6, cy / a6]
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(dist(v[i], v[j]));
            }
        }
        best
    }

    /// Edge half-planes with outward unit normals.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| {
                let p = v[i];
                let q = v[(i + 1) % n];
                let len = dist(p, q);
                let normal = [(q[1] - p[1]) / len, -(q[0] - p[0]) / len];
                HalfPlane {
                    normal,
                    offset: normal[0] * p[0] + normal[1] * p[1],
                }
            })
            .collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.half_planes().iter().all(|h| h.slack(p) >= 0.0)
    }

    /// Largest inscribed disk as `(center, radius)`.
    ///
    /// Maximizes the concave function `min_k slack_k(x)` by nested ternary search.
    pub fn inradius(&self) -> (Point, f64) {
        let planes = self.half_planes();
        let depth = |p: Point| planes.iter().map(|h| h.slack(p)).fold(f64::INFINITY, f64::min);
        let (lo, hi) = bounding_box(&self.vertices);
        let best_in_row = |y: f64| -> (f64, f64) {
            let (mut a, mut b) = (lo[0], hi[0]);
            for _ in 0..80 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if depth([m1, y]) < depth([m2, y]) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            let x = 0.5 * (a + b);
            (x, depth([x, y]))
        };
        let (mut a, mut b) = (lo[1], hi[1]);
        for _ in 0..80 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if best_in_row(m1).1 < best_in_row(m2).1 {
                a = m1;
            } else {
                b = m2;
            }
        }
        let y = 0.5 * (a + b);
        let (x, r) = best_in_row(y);
        ([x, y], r)
    }

    /// Dilation about the origin.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|p| [t * p[0], t * p[1]]).collect())
    }

    pub fn translated(&self, by: Point) -> Result<Self> {
        Self::new(self.vertices.iter().map(|p| [p[0] + by[0], p[1] + by[1]]).collect())
    }

    /// Copy with unit area and centroid at the origin.
    pub fn normalized(&self) -> Result<Self> {
        let c = self.centroid();
        let t = 1.0 / self.area().sqrt();
        Self::new(
            self.vertices
                .iter()
                .map(|p| [t * (p[0] - c[0]), t * (p[1] - c[1])])
                .collect(),
        )
    }
}

impl Region for ConvexPolygon2D {
    fn bounds(&self) -> (Point, Point) {
        bounding_box(&self.vertices)
    }

    fn line_crossings(&self, axis: usize, level: f64) -> Vec<f64> {
        polyline_crossings(&self.vertices, axis, level)
    }
}

/// `(area, perimeter)` of a convex polygon.
pub fn polygon_area_perimeter(poly: &ConvexPolygon2D) -> (f64, f64) {
    (poly.area(), poly.perimeter())
}

/// Convex hull by Andrew's monotone chain, dropping collinear points.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon2D> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(
            "convex hull needs at least 3 distinct points".into(),
        ));
    }
    let scale = scale_of(&pts);
    let eps = 1e-12 * scale * scale;
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    ConvexPolygon2D::new(hull)
}

/// Simple (not necessarily convex) polygon with counterclockwise vertices.
///
/// Self-intersection is not checked; callers build these from star-shaped curves.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        check_vertices(&vertices)?;
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        boundary_length(&self.vertices)
    }

    /// Even-odd point membership.
    pub fn contains(&self, p: Point) -> bool {
        let xs = polyline_crossings(&self.vertices, 0, p[1]);
        xs.iter().filter(|&&x| x < p[0]).count() % 2 == 1
    }
}

impl From<ConvexPolygon2D> for SimplePolygon {
    fn from(p: ConvexPolygon2D) -> Self {
        Self { vertices: p.vertices }
    }
}

impl Region for SimplePolygon {
    fn bounds(&self) -> (Point, Point) {
        bounding_box(&self.vertices)
    }

    fn line_crossings(&self, axis: usize, level: f64) -> Vec<f64> {
        polyline_crossings(&self.vertices, axis, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_measures() {
        let sq = ConvexPolygon2D::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let (a, p) = polygon_area_perimeter(&sq);
        assert_relative_eq!(a, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn right_triangle_measures() {
        let t = ConvexPolygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let (a, p) = polygon_area_perimeter(&t);
        assert_relative_eq!(a, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p, 2.0 + 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn regular_ngon_tends_to_circle() {
        let mut prev_gap = f64::INFINITY;
        for n in [16, 64, 256, 1024] {
            let (a, p) = polygon_area_perimeter(&ConvexPolygon2D::regular(n, 1.0).unwrap());
            let gap = (PI - a).abs() + (2.0 * PI - p).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-4);
    }

    #[test]
    fn rejects_bad_polygons() {
        // clockwise
        assert!(ConvexPolygon2D::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        // reflex vertex
        assert!(ConvexPolygon2D::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [2.0, 2.0], [0.0, 2.0]]).is_err());
        // collinear vertex
        assert!(ConvexPolygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).is_err());
        // repeated vertex
        assert!(ConvexPolygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        // too few
        assert!(ConvexPolygon2D::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        // pentagram: all left turns but winds twice
        let star: Vec<Point> = (0..5)
            .map(|k| {
                let t = 2.0 * std::f64::consts::TAU * k as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(ConvexPolygon2D::new(star).is_err());
    }

    #[test]
    fn inradius_of_known_shapes() {
        let sq = ConvexPolygon2D::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap();
        let (c, r) = sq.inradius();
        assert_relative_eq!(r, 1.0, epsilon = 1e-9);
        assert!(c[0].abs() < 1e-6 && c[1].abs() < 1e-6);
        // 3-4-5 triangle: r = (a + b - c) / 2 = 1
        let t = ConvexPolygon2D::new(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]]).unwrap();
        assert_relative_eq!(t.inradius().1, 1.0, epsilon = 1e-9);
        let thin = ConvexPolygon2D::rectangle(0.0, 0.0, 1.0, 0.01).unwrap();
        assert_relative_eq!(thin.inradius().1, 0.005, epsilon = 1e-10);
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0]];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert_relative_eq!(h.area(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn normalization_gives_unit_area_at_origin() {
        let t = ConvexPolygon2D::new(vec![[1.0, 1.0], [5.0, 2.0], [2.0, 4.0]]).unwrap();
        let n = t.normalized().unwrap();
        assert_relative_eq!(n.area(), 1.0, epsilon = 1e-13);
        let c = n.centroid();
        assert!(c[0].abs() < 1e-13 && c[1].abs() < 1e-13);
    }

    #[test]
    fn simple_polygon_membership() {
        // L-shape
        let l = SimplePolygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert!(l.contains([0.5, 1.5]));
        assert!(!l.contains([1.5, 1.5]));
        assert_relative_eq!(l.area(), 3.0, epsilon = 1e-14);
        assert_eq!(l.line_crossings(0, 0.5), vec![0.0, 2.0]);
        assert_eq!(l.line_crossings(0, 1.5), vec![0.0, 1.0]);
    }
}
