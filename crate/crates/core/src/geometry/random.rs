use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvexPolygon2D, Point};
use crate::error::{Error, Result};

/// Random convex polygon with `n` vertices, normalized to unit area with its
/// centroid at the origin. Deterministic in `seed`.
///
/// Valtr's construction: split sorted random coordinates into two chains per
/// axis, pair the resulting edge components randomly and chain the vectors in
/// angular order.
pub fn random_convex_polygon(n: usize, seed: u64) -> Result<ConvexPolygon2D> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("random polygon needs n >= 3, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Redraw on the (measure-zero, but float-reachable) near-collinear outcome.
    for _ in 0..1000 {
        if let Ok(p) = valtr(n, &mut rng).and_then(|p| p.normalized()) {
            return Ok(p);
        }
    }
    Err(Error::DegenerateInput(format!(
        "could not draw a valid {n}-gon for seed {seed}"
    )))
}

fn chain_components<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    let (min, max) = (xs[0], xs[n - 1]);
    let mut out = Vec::with_capacity(n);
    let (mut top, mut bottom) = (min, min);
    for &x in &xs[1..n - 1] {
        if rng.random::<bool>() {
            out.push(x - top);
            top = x;
        } else {
            out.push(bottom - x);
            bottom = x;
        }
    }
    out.push(max - top);
    out.push(bottom - max);
    out
}

fn valtr<R: Rng>(n: usize, rng: &mut R) -> Result<ConvexPolygon2D> {
    let xv = chain_components(n, rng);
    let mut yv = chain_components(n, rng);
    yv.shuffle(rng);
    let mut vecs: Vec<Point> = xv.into_iter().zip(yv).map(|(x, y)| [x, y]).collect();
    vecs.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let mut pts = Vec::with_capacity(n);
    let mut cur = [0.0, 0.0];
    for v in vecs {
        pts.push(cur);
        cur = [cur[0] + v[0], cur[1] + v[1]];
    }
    ConvexPolygon2D::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangles_are_valid() {
        for seed in 0..50 {
            let p = random_convex_polygon(3, seed).unwrap();
            assert_eq!(p.len(), 3);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = random_convex_polygon(64, 1).unwrap();
        let b = random_convex_polygon(64, 1).unwrap();
        let c = random_convex_polygon(64, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(c.len(), 64);
    }

    #[test]
    fn normalized_output() {
        for seed in 0..20 {
            let p = random_convex_polygon(10, seed).unwrap();
            assert_relative_eq!(p.area(), 1.0, epsilon = 1e-12);
            let c = p.centroid();
            assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_small_n() {
        assert!(random_convex_polygon(2, 0).is_err());
    }
}
