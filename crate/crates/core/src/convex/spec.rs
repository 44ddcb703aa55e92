//! JSON body specifications and named builtin bodies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{AffineMap, ConvexBody, Point, SmoothOracle};
use crate::error::{Error, Result};

pub const BUILTINS: &[&str] = &[
    "square",
    "cube",
    "disk",
    "ball",
    "simplex",
    "quadrant",
    "strip",
    "pz-hyperbola",
    "ellipse",
];

/// Serializable description of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    HPolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    VPolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ellipsoid {
        center: Vec<f64>,
        shape: Vec<Vec<f64>>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Affine {
        linear: Vec<Vec<f64>>,
        translation: Vec<f64>,
        inner: Box<BodySpec>,
    },
}

impl BodySpec {
    /// Parses either `builtin:<name>` or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(name) = t.strip_prefix("builtin:") {
            let spec = BodySpec::Builtin {
                name: name.to_string(),
                dim: None,
            };
            spec.build()?;
            return Ok(spec);
        }
        serde_json::from_str(t).map_err(|e| Error::InvalidBody(e.to_string()))
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::HPolytope { normals, offsets } => {
                ConvexBody::h_polytope(normals.iter().map(vec_of).collect(), offsets.clone())
            }
            BodySpec::VPolytope { vertices } => {
                ConvexBody::v_polytope(vertices.iter().map(vec_of).collect())
            }
            BodySpec::Ellipsoid { center, shape } => {
                ConvexBody::ellipsoid(vec_of(center), matrix_of(shape, center.len())?)
            }
            BodySpec::Builtin { name, dim } => builtin(name, *dim),
            BodySpec::Affine {
                linear,
                translation,
                inner,
            } => {
                let map = AffineMap::new(matrix_of(linear, translation.len())?, vec_of(translation))?;
                inner.build()?.apply_affine(&map)
            }
        }
    }
}

fn vec_of(v: &Vec<f64>) -> Point {
    DVector::from_vec(v.clone())
}

fn matrix_of(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidBody(format!("matrix must be {d}x{d}")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

/// Builds a named body; `dim` applies to `cube`, `ball` and `simplex`.
pub fn builtin(name: &str, dim: Option<usize>) -> Result<ConvexBody> {
    let fixed = |d: usize| -> Result<()> {
        match dim {
            Some(k) if k != d => Err(Error::InvalidBody(format!("builtin {name} has dimension {d}"))),
            _ => Ok(()),
        }
    };
    match name {
        "square" => {
            fixed(2)?;
            ConvexBody::cube(2, 1.0)
        }
        "cube" => ConvexBody::cube(dim.unwrap_or(3), 1.0),
        "disk" => {
            fixed(2)?;
            ConvexBody::ball(DVector::zeros(2), 1.0)
        }
        "ball" => ConvexBody::ball(DVector::zeros(dim.unwrap_or(3)), 1.0),
        "simplex" => {
            let d = dim.unwrap_or(2);
            let mut vs = vec![DVector::zeros(d)];
            for i in 0..d {
                let mut e = DVector::zeros(d);
                e[i] = 1.0;
                vs.push(e);
            }
            ConvexBody::v_polytope(vs)
        }
        "quadrant" => {
            fixed(2)?;
            ConvexBody::h_polytope(
                vec![DVector::from_vec(vec![-1.0, 0.0]), DVector::from_vec(vec![0.0, -1.0])],
                vec![0.0, 0.0],
            )
        }
        "strip" => {
            fixed(2)?;
            ConvexBody::h_polytope(
                vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![-1.0, 0.0])],
                vec![1.0, 1.0],
            )
        }
        "pz-hyperbola" => {
            fixed(2)?;
            Ok(ConvexBody::oracle(pz_hyperbola()))
        }
        "ellipse" => {
            fixed(2)?;
            ConvexBody::ellipsoid(
                DVector::zeros(2),
                DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 1.0])),
            )
        }
        _ => Err(Error::InvalidBody(format!(
            "unknown builtin '{name}'; valid builtins: {}",
            BUILTINS.join(", ")
        ))),
    }
}

/// `{x_1 > 0, x_2 > 0, x_1 x_2 > 1}`.
pub fn pz_hyperbola() -> SmoothOracle {
    SmoothOracle::new(
        2,
        |x: &Point| x[0] > 0.0 && x[1] > 0.0 && x[0] * x[1] > 1.0,
        |u: &Point| {
            if u[0] <= 0.0 && u[1] <= 0.0 {
                -2.0 * (u[0] * u[1]).sqrt()
            } else {
                f64::INFINITY
            }
        },
    )
    .with_interior(DVector::from_vec(vec![2.0, 2.0]))
    .with_name("pz-hyperbola")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_build() {
        for name in BUILTINS {
            let b = builtin(name, None).unwrap();
            assert!(b.contains(&b.interior_point().unwrap()).unwrap(), "{name}");
        }
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let e = BodySpec::parse("builtin:hexagon").unwrap_err().to_string();
        assert!(e.contains("pz-hyperbola") && e.contains("square"));
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let s = r#"{"type":"ellipsoid","center":[0,0],"shape":[[1,0],[0,4]]}"#;
        let spec = BodySpec::parse(s).unwrap();
        let b = spec.build().unwrap();
        assert!((b.support(&DVector::from_vec(vec![0.0, 1.0])).unwrap() - 0.5).abs() < 1e-15);
        let back: BodySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"type":"ellipsoid","center":[0,0],"shape":[[1,0],[0,4]],"radius":2}"#;
        assert!(BodySpec::parse(bad).is_err());
    }

    #[test]
    fn pz_support_and_properness() {
        let b = builtin("pz-hyperbola", None).unwrap();
        let h = b.support(&DVector::from_vec(vec![-1.0, -1.0])).unwrap();
        assert!((h + 2.0).abs() < 1e-15);
        assert!(b.is_properly_convex().proper);
        assert!(!b.is_bounded());
    }
}
