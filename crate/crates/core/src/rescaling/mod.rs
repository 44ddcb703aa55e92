//! Affine normalization of pointed bodies and blow-up limits at boundary points.

mod john;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::convex::{
    detect_boundary_segment, truncated_support, AffineMap, BoundarySegment, ConvexBody, Point,
    PointedBody, SegmentOptions,
};
use crate::error::{Error, Result};
use crate::net::{random_unit, seeded_rng, DirectionNet, NetOptions};

/// Duality-gap target of the ellipsoid solver.
pub const JOHN_GAP: f64 = 1e-10;

/// Affine map sending the basepoint to the origin and the maximal centred
/// ellipsoid of the symmetrized body `A(C) ∩ −A(C)` to the unit ball.
/// The linear part is symmetric positive definite.
pub fn john_normalize(pb: &PointedBody) -> Result<AffineMap> {
    let body = &pb.body;
    let p = &pb.basepoint;
    if !body.contains(p)? {
        return Err(Error::NotInterior);
    }
    let pc = body.is_properly_convex();
    if !pc.proper {
        return Err(Error::NotProperlyConvex {
            witness: pc.witness.map(|w| w.iter().copied().collect()),
        });
    }
    let d = body.dim();
    if let ConvexBody::Ellipsoid(e) = body {
        if (p - e.center()).norm() <= 1e-14 * (1.0 + p.norm()) {
            let root = john::sym_sqrt(e.shape());
            return AffineMap::new(root.clone(), -(root * p));
        }
    }
    let mut b = match facet_rows(body, p) {
        Some(rows) => john::sym_sqrt(&john::max_det_ellipsoid(&rows, JOHN_GAP)?.x),
        None => net_ellipsoid(body, p)?,
    };
    if !matches!(body, ConvexBody::HPolytope(_) | ConvexBody::VPolytope(_)) {
        // The rows only bound the body from outside, so shrink until the ellipsoid fits.
        // The hull of net points at radius rho contains the ball of radius rho·cos(resolution).
        let net = check_net(d);
        let mut rho = f64::INFINITY;
        for w in &net.dirs {
            let v = &b * w;
            rho = rho.min(body.exit(p, &v)).min(body.exit(p, &-&v));
        }
        let rho = rho * net.resolution.cos();
        if rho < 1.0 {
            b *= rho;
        }
    }
    let binv = b
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("degenerate inscribed ellipsoid".into()))?;
    let t = -(&binv * p);
    AffineMap::new(binv, t)
}

fn check_net(d: usize) -> DirectionNet {
    if d == 2 {
        DirectionNet::planar(720)
    } else {
        DirectionNet::new(
            d,
            &NetOptions {
                high_dim_count: 1024,
                ..NetOptions::default()
            },
        )
    }
}

/// Slab rows `a` with `{|⟨a, y − p⟩| < 1}` ⊇ symmetrized polytope.
fn facet_rows(body: &ConvexBody, p: &Point) -> Option<Vec<Point>> {
    let h = match body {
        ConvexBody::HPolytope(h) => h,
        ConvexBody::VPolytope(v) => v.facets(),
        _ => return None,
    };
    Some(
        h.normals()
            .iter()
            .zip(h.offsets())
            .map(|(n, c)| n / (c - n.dot(p)))
            .collect(),
    )
}

/// Support-net route, iterated in the current normalized frame `y = B⁻¹(x − p)`
/// so that the net stays well resolved for elongated bodies.
fn net_ellipsoid(body: &ConvexBody, p: &Point) -> Result<DMatrix<f64>> {
    let d = body.dim();
    let net = check_net(d);
    // starting frame from the second moment of the symmetric radial extents
    let mut moment = DMatrix::zeros(d, d);
    for w in &net.dirs {
        let r = body.exit(p, w).min(body.exit(p, &-w));
        if r.is_finite() {
            moment += w * w.transpose() * (r * r);
        }
    }
    moment *= d as f64 / net.len() as f64;
    let mut b = if moment.clone().cholesky().is_some() {
        john::sym_sqrt(&moment)
    } else {
        DMatrix::identity(d, d)
    };
    for _ in 0..12 {
        let binv = b
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Internal("degenerate inscribed ellipsoid".into()))?;
        let mut rows = Vec::with_capacity(net.len());
        for w in &net.dirs {
            let u = &binv * w;
            let h = body.h(&u) - p.dot(&u);
            if h.is_finite() && h > 0.0 {
                rows.push(w / h);
            } else if !h.is_finite() {
                let t = body.exit(p, &(&b * w));
                if t.is_finite() {
                    rows.push(w / t);
                }
            }
        }
        let x = john::max_det_ellipsoid(&rows, JOHN_GAP)?.x;
        let change = (&x - DMatrix::identity(d, d)).amax();
        let m = &b * x * &b;
        b = john::sym_sqrt(&((&m + m.transpose()) * 0.5));
        if change < 1e-10 {
            break;
        }
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    None,
    John,
}

#[derive(Clone, Debug)]
pub struct BlowupSpec {
    pub body: ConvexBody,
    pub target: Point,
    pub rates: Vec<f64>,
    pub normalization: Normalization,
    /// Basepoint before rescaling is `target + (offset / λ)·w` with `w` the inward estimate.
    pub basepoint_offset: f64,
    pub seed: u64,
}

impl BlowupSpec {
    pub fn new(body: ConvexBody, target: Point, rates: Vec<f64>, normalization: Normalization) -> Self {
        Self {
            body,
            target,
            rates,
            normalization,
            basepoint_offset: 1.0,
            seed: 0x626c_6f77,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlowupTerm {
    pub rate: f64,
    pub map: AffineMap,
    pub pointed: PointedBody,
}

/// Unit inward direction at a boundary point: mean direction to seeded interior samples nearby.
pub fn inward_direction(body: &ConvexBody, target: &Point, seed: u64) -> Result<Point> {
    let d = body.dim();
    let mut rng = seeded_rng(seed);
    let mut rho = 1.0;
    let mut found: Vec<Point> = Vec::new();
    for _ in 0..60 {
        for _ in 0..256 {
            let u = random_unit(&mut rng, d);
            let r = rho * rng.random::<f64>().powf(1.0 / d as f64);
            let x = target + u * r;
            if r > 0.0 && body.inside(&x) {
                found.push((x - target) / r);
                if found.len() == 16 {
                    break;
                }
            }
        }
        if found.len() == 16 {
            break;
        }
        found.clear();
        rho *= 0.5;
    }
    if found.is_empty() {
        return Err(Error::NotOnBoundary { tol: 1e-9 });
    }
    let mean = found.iter().fold(DVector::zeros(d), |a, v| a + v);
    let n = mean.norm();
    if n == 0.0 {
        return Err(Error::NotOnBoundary { tol: 1e-9 });
    }
    Ok(mean / n)
}

/// Rescalings `x ↦ λ(x − target)`, optionally followed by John normalization.
pub fn blowup_sequence(spec: &BlowupSpec) -> Result<Vec<BlowupTerm>> {
    let body = &spec.body;
    if spec.target.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: spec.target.len(),
        });
    }
    if spec.rates.is_empty()
        || spec.rates.iter().any(|r| !(*r > 0.0) || !r.is_finite())
        || spec.rates.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidArgument("rates must be positive and increasing".into()));
    }
    if !(spec.basepoint_offset > 0.0) {
        return Err(Error::InvalidArgument("basepoint offset must be positive".into()));
    }
    if body.inside(&spec.target) {
        return Err(Error::NotOnBoundary { tol: 1e-9 });
    }
    let w = inward_direction(body, &spec.target, spec.seed)?;
    if !body.inside(&(&spec.target + &w * 1e-9)) {
        return Err(Error::NotOnBoundary { tol: 1e-9 });
    }
    let mut out = Vec::with_capacity(spec.rates.len());
    for &lambda in &spec.rates {
        let s = AffineMap::scaling_about(&spec.target, lambda)?;
        let base = &spec.target + &w * (spec.basepoint_offset / lambda);
        if !body.inside(&base) {
            return Err(Error::InvalidArgument(format!(
                "rate {lambda} puts the basepoint outside the body"
            )));
        }
        let scaled = PointedBody::new(body.apply_affine(&s)?, s.apply(&base))?;
        let (map, pointed) = match spec.normalization {
            Normalization::None => (s, scaled),
            Normalization::John => {
                let j = john_normalize(&scaled)?;
                let pb = scaled.apply_affine(&j)?;
                (j.compose(&s), pb)
            }
        };
        out.push(BlowupTerm {
            rate: lambda,
            map,
            pointed,
        });
    }
    Ok(out)
}

/// Truncated support function of a body on a direction net.
#[derive(Clone, Debug)]
pub struct LimitSamples {
    pub radius: f64,
    pub net: DirectionNet,
    pub support: Vec<f64>,
}

impl LimitSamples {
    pub fn of(body: &ConvexBody, radius: f64, net: &DirectionNet) -> Result<Self> {
        Ok(Self {
            radius,
            net: net.clone(),
            support: truncated_support(body, radius, net)?,
        })
    }

    /// Polytope `{x : ⟨x, u⟩ < h(u)}` over the net.
    pub fn to_polytope(&self) -> Result<ConvexBody> {
        ConvexBody::h_polytope(self.net.dirs.clone(), self.support.clone())
    }

    pub fn distance(&self, other: &LimitSamples) -> f64 {
        self.support
            .iter()
            .zip(&other.support)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitLimit {
    pub limit: LimitSamples,
    /// Local Hausdorff distance between consecutive terms.
    pub consecutive: Vec<f64>,
    pub cauchy: bool,
    pub error_bound: f64,
}

/// Truncated supports of every term; Cauchy when the last consecutive distance is below `tol`.
pub fn orbit_limit(seq: &[PointedBody], radius: f64, tol: f64, opts: &NetOptions) -> Result<OrbitLimit> {
    let first = seq
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
    if !(radius > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("radius and tol must be positive".into()));
    }
    let net = DirectionNet::new(first.body.dim(), opts);
    let mut samples = Vec::with_capacity(seq.len());
    for pb in seq {
        if !pb.body.contains(&pb.basepoint)? {
            return Err(Error::NotInterior);
        }
        samples.push(LimitSamples::of(&pb.body, radius, &net)?);
    }
    let consecutive: Vec<f64> = samples.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let cauchy = consecutive.last().is_none_or(|d| *d < tol);
    Ok(OrbitLimit {
        limit: samples.pop().expect("nonempty"),
        consecutive,
        cauchy,
        error_bound: net.resolution * radius,
    })
}

#[derive(Clone, Debug)]
pub struct StrictnessVerdict {
    pub witness: Option<BoundarySegment>,
    /// Some pair of antipodal net directions both reach the truncation radius,
    /// as they do when the limit contains a line through the window.
    pub spans_window_line: bool,
}

impl StrictnessVerdict {
    pub fn is_strict(&self) -> bool {
        self.witness.is_none()
    }
}

/// Rebuilds the truncated limit and searches it for a boundary segment in the `0.9 R` window.
pub fn limit_strictness_verdict(limit: &LimitSamples, tol: f64) -> Result<StrictnessVerdict> {
    let body = limit.to_polytope()?;
    let window = 0.9 * limit.radius;
    let opts = SegmentOptions::default();
    let witness = detect_boundary_segment(&body, window, tol, &opts);
    let reach = limit.radius * (1.0 - 1e-6);
    let mut spans = false;
    let n = limit.net.len();
    for i in 0..n {
        if limit.support[i] < reach {
            continue;
        }
        let neg = -&limit.net.dirs[i];
        if let Some(j) = (0..n).find(|&j| (&limit.net.dirs[j] - &neg).norm() < 1e-12) {
            if limit.support[j] >= reach {
                spans = true;
                break;
            }
        }
    }
    Ok(StrictnessVerdict {
        witness,
        spans_window_line: spans,
    })
}

/// Largest and smallest radii of the symmetrized image, sampled on a net.
pub fn sandwich_radii(body: &ConvexBody, net: &DirectionNet) -> (f64, f64) {
    let o = DVector::zeros(body.dim());
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for u in &net.dirs {
        let r = body.exit(&o, u).min(body.exit(&o, &-u));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

/// Polar decomposition check used by tests: linear part is symmetric positive definite.
pub fn is_spd(m: &DMatrix<f64>) -> bool {
    (m - m.transpose()).amax() <= 1e-9 * m.amax() && m.clone().cholesky().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::spec::builtin;
    use nalgebra::dvector;

    #[test]
    fn john_of_disks_and_square() {
        let disk = builtin("disk", None).unwrap();
        let m = john_normalize(&PointedBody::new(disk, DVector::zeros(2)).unwrap()).unwrap();
        assert!((m.linear() - DMatrix::identity(2, 2)).amax() < 1e-12);
        let big = ConvexBody::ball(DVector::zeros(2), 5.0).unwrap();
        let m = john_normalize(&PointedBody::new(big, DVector::zeros(2)).unwrap()).unwrap();
        assert!((m.linear() - DMatrix::identity(2, 2) / 5.0).amax() < 1e-12);
        let sq = builtin("square", None).unwrap();
        let m = john_normalize(&PointedBody::new(sq, DVector::zeros(2)).unwrap()).unwrap();
        assert!((m.linear() - DMatrix::identity(2, 2)).amax() < 1e-7);
    }

    #[test]
    fn john_sandwich_off_centre() {
        let d = 2.0;
        let pb = PointedBody::new(builtin("ellipse", None).unwrap(), dvector![1.2, 0.5]).unwrap();
        let a = john_normalize(&pb).unwrap();
        assert!(is_spd(a.linear()));
        assert!(a.apply(&pb.basepoint).norm() < 1e-12);
        let img = pb.body.apply_affine(&a).unwrap();
        let (lo, hi) = sandwich_radii(&img, &DirectionNet::planar(2048));
        assert!(lo >= 1.0 - 1e-9, "{lo}");
        assert!(hi <= d + 1e-3, "{hi}");
    }

    #[test]
    fn strip_rejected() {
        let pb = PointedBody::new(builtin("strip", None).unwrap(), DVector::zeros(2)).unwrap();
        assert!(matches!(john_normalize(&pb), Err(Error::NotProperlyConvex { .. })));
    }

    #[test]
    fn square_vertex_blowup() {
        let spec = BlowupSpec::new(
            builtin("square", None).unwrap(),
            dvector![1.0, 1.0],
            vec![2.0, 4.0, 8.0],
            Normalization::None,
        );
        let terms = blowup_sequence(&spec).unwrap();
        for t in &terms {
            assert!(t.map.apply(&spec.target).norm() == 0.0);
            let h = t.pointed.body.support(&dvector![-1.0, 0.0]).unwrap();
            assert!((h - 2.0 * t.rate).abs() < 1e-9);
        }
        let seq: Vec<_> = terms.into_iter().map(|t| t.pointed).collect();
        let lim = orbit_limit(&seq, 1.0, 1e-6, &NetOptions::default()).unwrap();
        assert!(lim.cauchy);
        let v = limit_strictness_verdict(&lim.limit, 1e-6).unwrap();
        assert!(v.witness.unwrap().length() >= 0.5);
        assert!(!v.spans_window_line);
    }

    #[test]
    fn interior_target_rejected() {
        let spec = BlowupSpec::new(
            builtin("square", None).unwrap(),
            dvector![0.5, 0.0],
            vec![2.0],
            Normalization::None,
        );
        assert!(matches!(blowup_sequence(&spec), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn alternating_not_cauchy() {
        let sq = PointedBody::new(builtin("square", None).unwrap(), DVector::zeros(2)).unwrap();
        let dk = PointedBody::new(builtin("disk", None).unwrap(), DVector::zeros(2)).unwrap();
        let seq = vec![sq.clone(), dk.clone(), sq, dk];
        let lim = orbit_limit(&seq, 2.0, 0.1, &NetOptions::default()).unwrap();
        assert!(!lim.cauchy);
    }
}
