use nalgebra::DVector;

use super::hausdorff::{ball_exit, find_interior_point};
use super::lp::{Lp, LpOutcome};
use super::{ConvexBody, HPolytope, Point};
use crate::net::DirectionNet;

/// Two boundary points whose connecting segment stays within `gap` of the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    pub gap: f64,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        (&self.a - &self.b).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentOptions {
    pub samples: usize,
    /// Shortest chord considered; defaults to `4·sqrt(window·tol)`.
    pub min_len: Option<f64>,
    pub seed: u64,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        Self {
            samples: 512,
            min_len: None,
            seed: 0x7365_676d,
        }
    }
}

/// Search for a nontrivial boundary segment inside the window ball.
/// Polytopes are inspected facet by facet; other bodies by chords between
/// radial boundary samples.
pub fn detect_boundary_segment(
    body: &ConvexBody,
    window: f64,
    tol: f64,
    opts: &SegmentOptions,
) -> Option<BoundarySegment> {
    if body.dim() < 2 || !(tol > 0.0) || !(window > 0.0) {
        return None;
    }
    match body {
        ConvexBody::HPolytope(p) => facet_segment(p, window, min_len(window, tol, opts)),
        ConvexBody::VPolytope(v) => facet_segment(v.facets(), window, min_len(window, tol, opts)),
        _ => chord_segment(body, window, tol, opts),
    }
}

fn min_len(window: f64, tol: f64, opts: &SegmentOptions) -> f64 {
    opts.min_len.unwrap_or(4.0 * (window * tol).sqrt())
}

fn facet_segment(p: &HPolytope, window: f64, min_len: f64) -> Option<BoundarySegment> {
    let d = p.dim();
    let mut best: Option<BoundarySegment> = None;
    for (i, (n, c)) in p.normals().iter().zip(p.offsets()).enumerate() {
        let base = if d == 2 {
            Some(n * *c)
        } else {
            facet_point(p, i, window)
        };
        let Some(base) = base else { continue };
        let t = tangent(n);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (j, (m, e)) in p.normals().iter().zip(p.offsets()).enumerate() {
            if j == i {
                continue;
            }
            let mt = m.dot(&t);
            let slack = e - m.dot(&base);
            if mt.abs() < 1e-14 {
                if slack < -1e-12 {
                    lo = f64::INFINITY;
                }
                continue;
            }
            if mt > 0.0 {
                hi = hi.min(slack / mt);
            } else {
                lo = lo.max(slack / mt);
            }
        }
        // clip to the closed window ball
        let b = base.dot(&t);
        let disc = b * b - (base.dot(&base) - window * window);
        if disc <= 0.0 {
            continue;
        }
        lo = lo.max(-b - disc.sqrt());
        hi = hi.min(-b + disc.sqrt());
        if !(hi > lo) || (hi - lo) < 1e-12 * window {
            continue;
        }
        let trim = (hi - lo) / 8.0;
        let seg = BoundarySegment {
            a: &base + &t * (lo + trim),
            b: &base + &t * (hi - trim),
            gap: 0.0,
        };
        if seg.length() < min_len {
            continue;
        }
        if best.as_ref().is_none_or(|s| seg.length() > s.length() + 1e-12) {
            best = Some(seg);
        }
    }
    best
}

fn tangent(n: &Point) -> Point {
    let d = n.len();
    if d == 2 {
        return DVector::from_vec(vec![-n[1], n[0]]);
    }
    let mut best = DVector::zeros(d);
    for k in 0..d {
        let mut e = DVector::zeros(d);
        e[k] = 1.0;
        let proj = &e - n * n[k];
        if proj.norm() > best.norm() {
            best = proj;
        }
    }
    let len = best.norm();
    best / len
}

// Relative-interior point of facet `i` within the window box, if the facet is nondegenerate.
fn facet_point(p: &HPolytope, i: usize, window: f64) -> Option<Point> {
    let d = p.dim();
    let zero = DVector::zeros(d);
    let half = window / (d as f64).sqrt();
    let mut box_rows = Vec::new();
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut e = DVector::zeros(d);
            e[k] = s;
            box_rows.push(e);
        }
    }
    let mut le_rows: Vec<(&Point, f64, f64)> = p
        .normals()
        .iter()
        .zip(p.offsets())
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, (n, c))| (n, 1.0, *c))
        .collect();
    le_rows.extend(box_rows.iter().map(|e| (e, 1.0, half)));
    let lp = Lp {
        dim: d,
        objective: &zero,
        slack_objective: 1.0,
        slack_bounds: (f64::NEG_INFINITY, 1.0),
        le_rows,
        eq_rows: vec![(&p.normals()[i], p.offsets()[i])],
    };
    match lp.solve() {
        LpOutcome::Optimal { value, x } if value > 1e-9 * window => Some(x),
        _ => None,
    }
}

fn chord_segment(
    body: &ConvexBody,
    window: f64,
    tol: f64,
    opts: &SegmentOptions,
) -> Option<BoundarySegment> {
    let d = body.dim();
    let q = find_interior_point(body, window).ok()?;
    let net = if d == 2 {
        DirectionNet::planar(opts.samples.max(8))
    } else {
        DirectionNet::random(d, opts.samples.max(8), opts.seed)
    };
    // boundary samples that lie inside the window, in net order
    let pts: Vec<Option<Point>> = net
        .dirs
        .iter()
        .map(|w| {
            let t = body.exit(&q, w);
            (t.is_finite() && t < ball_exit(&q, w, window)).then(|| &q + w * t)
        })
        .collect();
    let min_len = min_len(window, tol, opts);
    let gap_at = |m: &Point| -> f64 {
        let dir = m - &q;
        let r = dir.norm();
        if r < 1e-300 {
            return f64::INFINITY;
        }
        let w = dir / r;
        body.exit(&q, &w) - r
    };
    let check = |a: &Point, b: &Point| -> Option<f64> {
        let mut worst = 0.0f64;
        for s in [0.5, 0.25, 0.75] {
            let g = gap_at(&(a * (1.0 - s) + b * s));
            if !(g <= tol) {
                return None;
            }
            worst = worst.max(g);
        }
        Some(worst)
    };
    let n = pts.len();
    let mut best: Option<BoundarySegment> = None;
    let mut consider = |a: &Point, b: &Point, gap: f64| {
        let seg = BoundarySegment {
            a: a.clone(),
            b: b.clone(),
            gap,
        };
        if best.as_ref().is_none_or(|s| seg.length() > s.length()) {
            best = Some(seg);
        }
    };
    if net.angular_order {
        for i in 0..n {
            let Some(a) = &pts[i] else { continue };
            for j in 1..n / 2 {
                let Some(b) = &pts[(i + j) % n] else { break };
                if (a - b).norm() < min_len {
                    continue;
                }
                match check(a, b) {
                    Some(g) => consider(a, b, g),
                    None => break,
                }
            }
        }
    } else {
        for i in 0..n {
            let Some(a) = &pts[i] else { continue };
            for b in pts[i + 1..].iter().flatten() {
                if (a - b).norm() < min_len {
                    continue;
                }
                if let Some(g) = check(a, b) {
                    consider(a, b, g);
                }
            }
        }
    }
    best
}
