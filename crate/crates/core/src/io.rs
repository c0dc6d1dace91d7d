//! File formats: shape and profile JSON, CSV number formatting.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon2D, Ellipsoid, Point};
use crate::thin::{Base, Thickness, ThicknessProfile};

/// A shape as read from JSON:
/// `{"kind":"polygon","vertices":[[x,y],..]}` or `{"kind":"ellipsoid","d":..,"a":[..]}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Polygon(ConvexPolygon2D),
    Ellipsoid(Ellipsoid),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ShapeFile {
    Polygon { vertices: Vec<Point> },
    Ellipsoid { d: usize, a: Vec<f64> },
}

impl Shape {
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<ShapeFile>(text)? {
            ShapeFile::Polygon { vertices } => Ok(Shape::Polygon(ConvexPolygon2D::new(vertices)?)),
            ShapeFile::Ellipsoid { d, a } => {
                if a.len() != d {
                    return Err(Error::InvalidShape(format!(
                        "ellipsoid of dimension {d} needs {d} semi-axes, got {}",
                        a.len()
                    )));
                }
                Ok(Shape::Ellipsoid(Ellipsoid::new(a)?))
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = match self {
            Shape::Polygon(p) => ShapeFile::Polygon {
                vertices: p.vertices().to_vec(),
            },
            Shape::Ellipsoid(e) => ShapeFile::Ellipsoid {
                d: e.dim(),
                a: e.semi_axes().to_vec(),
            },
        };
        serde_json::to_string(&file).expect("shape serializes")
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Polygon(_) => 2,
            Shape::Ellipsoid(e) => e.dim(),
        }
    }

    /// The same shape dilated by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Ok(match self {
            Shape::Polygon(p) => Shape::Polygon(p.scaled(t)?),
            Shape::Ellipsoid(e) => Shape::Ellipsoid(e.scaled(t)?),
        })
    }
}

fn read_text(path: &Path) -> std::io::Result<String> {
    std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum BaseFile {
    Interval {
        a: f64,
        b: f64,
    },
    Ball {
        #[serde(rename = "N")]
        n: usize,
    },
    Polygon {
        vertices: Vec<Point>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ThicknessFile {
    Samples { x: Vec<f64>, y: Vec<f64> },
    Tent,
    Const { c: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    base: BaseFile,
    h: ThicknessFile,
}

/// Parses `{"base":{..},"h":{..}}` profile JSON.
pub fn profile_from_json(text: &str) -> Result<ThicknessProfile> {
    let f: ProfileFile = serde_json::from_str(text)?;
    let base = match f.base {
        BaseFile::Interval { a, b } => Base::Interval { a, b },
        BaseFile::Ball { n } => Base::Ball { n },
        BaseFile::Polygon { vertices } => Base::Polygon(ConvexPolygon2D::new(vertices)?),
    };
    let h = match f.h {
        ThicknessFile::Samples { x, y } => Thickness::Samples { x, y },
        ThicknessFile::Tent => Thickness::Tent,
        ThicknessFile::Const { c } => Thickness::Const(c),
    };
    ThicknessProfile::new(base, h)
}

pub fn read_profile(path: &Path) -> Result<ThicknessProfile> {
    profile_from_json(&read_text(path)?)
}

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 12)
}

pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_json_roundtrip() {
        let sq = Shape::Polygon(ConvexPolygon2D::rectangle(0.0, 0.0, 1.0, 1.0).unwrap());
        assert_eq!(Shape::from_json(&sq.to_json()).unwrap(), sq);
        let e = Shape::from_json(r#"{"kind":"ellipsoid","d":3,"a":[1,2,3]}"#).unwrap();
        assert_eq!(e.dim(), 3);
        assert!(matches!(
            Shape::from_json(r#"{"kind":"ellipsoid","d":2,"a":[1,2,3]}"#),
            Err(Error::InvalidShape(_))
        ));
        assert!(matches!(Shape::from_json(r#"{"kind":"blob"}"#), Err(Error::Parse(_))));
        assert!(Shape::from_json(r#"{"kind":"polygon","vertices":[[0,0],[1,0],[2,0]]}"#).is_err());
    }

    #[test]
    fn profile_json() {
        let p = profile_from_json(r#"{"base":{"kind":"ball","N":2},"h":{"kind":"tent"}}"#).unwrap();
        assert_eq!(p.d(), 3);
        let p =
            profile_from_json(r#"{"base":{"kind":"interval","a":0,"b":1},"h":{"kind":"samples","x":[0,1],"y":[1,2]}}"#)
                .unwrap();
        assert_eq!(p.eval(&[0.5]), 1.5);
        let p = profile_from_json(
            r#"{"base":{"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]},"h":{"kind":"const","c":2}}"#,
        )
        .unwrap();
        assert_eq!(p.d(), 3);
        assert!(profile_from_json(r#"{"base":{"kind":"interval","a":1,"b":0},"h":{"kind":"tent"}}"#).is_err());
        assert!(matches!(profile_from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_sig(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1e-7), "1e-07");
        assert_eq!(fmt_sig(8.333333333333333e-5), "8.33333333333e-05");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(0.0), "0");
    }
}
