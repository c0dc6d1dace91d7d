//! Numerical laboratory for the scale-free shape functionals
//! `F_q(Ω) = P(Ω) T(Ω)^q / |Ω|^{α_q}` built from perimeter, volume and
//! torsional rigidity.

// `!(x > 0.0)` is the NaN-rejecting form used throughout input validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod functionals;
pub mod geometry;
pub mod io;
pub mod quad;
pub mod search;
pub mod special;
pub mod thin;
pub mod torsion;

pub use error::{Error, Result};
pub use functionals::{BoundReport, ShapeMeasures};
pub use geometry::{ConvexPolygon2D, Ellipsoid, Point, Region, SimplePolygon};
pub use io::Shape;
pub use thin::{ThicknessProfile, ThinAsymptotics};
pub use torsion::TorsionSolution;
