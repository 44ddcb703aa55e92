use nalgebra::DVector;

use super::{ConvexBody, Point};
use crate::error::{Error, Result};
use crate::net::{DirectionNet, NetOptions};

/// Hausdorff distance estimate between ball truncations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffEstimate {
    pub value: f64,
    /// Net resolution times the truncation radius.
    pub error_bound: f64,
}

/// Exit parameter of the ray `p + t v` from the open ball of radius `r` about the origin.
pub(crate) fn ball_exit(p: &Point, v: &Point, r: f64) -> f64 {
    let a = v.dot(v);
    let b = p.dot(v);
    let c = p.dot(p) - r * r;
    let disc = (b * b - a * c).max(0.0);
    if b <= 0.0 {
        (-b + disc.sqrt()) / a
    } else {
        -c / (b + disc.sqrt())
    }
}

fn search_directions(dim: usize) -> Vec<Point> {
    let mut dirs: Vec<Point> = Vec::new();
    if dim == 2 {
        dirs = DirectionNet::planar(64).dirs;
    } else {
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut e = DVector::zeros(dim);
                e[i] = s;
                dirs.push(e);
            }
        }
        dirs.extend(DirectionNet::random(dim, 64, 0x696e_7472).dirs);
    }
    dirs
}

/// A point of `body ∩ B_R`, roughly centred by alternating axis chords.
pub fn find_interior_point(body: &ConvexBody, radius: f64) -> Result<Point> {
    let d = body.dim();
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let in_ball = |p: &Point| p.norm() < radius;
    let mut start = None;
    let origin = DVector::zeros(d);
    if body.inside(&origin) {
        start = Some(origin);
    }
    if start.is_none() {
        if let Some(q) = hint(body).filter(|q| in_ball(q) && body.inside(q)) {
            start = Some(q);
        }
    }
    if start.is_none() {
        let dirs = search_directions(d);
        let mut r = radius * 0.9;
        'outer: for _ in 0..40 {
            for w in &dirs {
                let p = w * r;
                if body.inside(&p) {
                    start = Some(p);
                    break 'outer;
                }
            }
            r *= 0.5;
        }
    }
    let mut p = start.ok_or(Error::EmptyIntersection { radius })?;
    for _ in 0..3 {
        for i in 0..d {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            let fwd = body.exit(&p, &e).min(ball_exit(&p, &e, radius));
            let back = body.exit(&p, &-&e).min(ball_exit(&p, &-&e, radius));
            let q = &p + &e * (0.5 * (fwd - back));
            if body.inside(&q) && in_ball(&q) {
                p = q;
            }
        }
    }
    Ok(p)
}

// Only exact representations carry a cheap interior point; oracles would recurse.
fn hint(body: &ConvexBody) -> Option<Point> {
    match body {
        ConvexBody::Oracle(o) => o.interior_hint.clone(),
        ConvexBody::AffineImage { map, inner } => hint(inner).map(|q| map.apply(&q)),
        _ => body.interior_point(),
    }
}

/// Support values of the closure of `body ∩ B_R` on every direction of `net`,
/// computed from radial boundary samples about an interior point.
pub fn truncated_support(body: &ConvexBody, radius: f64, net: &DirectionNet) -> Result<Vec<f64>> {
    if net.dim != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: net.dim,
        });
    }
    let q = find_interior_point(body, radius)?;
    let samples: Vec<Point> = net
        .dirs
        .iter()
        .map(|w| {
            let t = body.exit(&q, w).min(ball_exit(&q, w, radius));
            &q + w * t
        })
        .collect();
    if net.dim == 1 {
        return Ok(net.dirs.iter().map(|u| max_dot(&samples, u)).collect());
    }
    if net.angular_order {
        return Ok(planar_support(&samples, &net.dirs));
    }
    Ok(net.dirs.iter().map(|u| max_dot(&samples, u)).collect())
}

fn max_dot(samples: &[Point], u: &Point) -> f64 {
    samples.iter().map(|s| s.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

// Samples are in angular order around an interior point, hence in convex position;
// the maximizing index advances monotonically as the direction rotates.
fn planar_support(samples: &[Point], dirs: &[Point]) -> Vec<f64> {
    let n = samples.len();
    let dot = |k: usize, u: &Point| samples[k][0] * u[0] + samples[k][1] * u[1];
    let mut k = (0..n)
        .max_by(|a, b| dot(*a, &dirs[0]).total_cmp(&dot(*b, &dirs[0])))
        .unwrap_or(0);
    let mut out = Vec::with_capacity(dirs.len());
    for u in dirs {
        let mut steps = 0;
        while steps < n && dot((k + 1) % n, u) >= dot(k, u) {
            k = (k + 1) % n;
            steps += 1;
        }
        while steps < n && dot((k + n - 1) % n, u) > dot(k, u) {
            k = (k + n - 1) % n;
            steps += 1;
        }
        out.push(dot(k, u));
    }
    out
}

/// Hausdorff distance between the closures of `body1 ∩ B_R` and `body2 ∩ B_R`,
/// as the sup-norm difference of their support functions on a direction net.
pub fn local_hausdorff(
    body1: &ConvexBody,
    body2: &ConvexBody,
    radius: f64,
    opts: &NetOptions,
) -> Result<HausdorffEstimate> {
    if body1.dim() != body2.dim() {
        return Err(Error::DimensionMismatch {
            expected: body1.dim(),
            got: body2.dim(),
        });
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let net = DirectionNet::new(body1.dim(), opts);
    let h1 = truncated_support(body1, radius, &net)?;
    let h2 = truncated_support(body2, radius, &net)?;
    Ok(HausdorffEstimate {
        value: support_distance(&h1, &h2),
        error_bound: net.resolution * radius,
    })
}

pub(crate) fn support_distance(h1: &[f64], h2: &[f64]) -> f64 {
    h1.iter()
        .zip(h2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}
