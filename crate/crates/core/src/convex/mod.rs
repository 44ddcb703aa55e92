//! Convex open bodies in real d-space and their oracles.
//!
//! Every body is an open set: membership is strict, boundary points are outside.

mod affine;
mod hausdorff;
mod lp;
mod segment;
pub mod spec;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::net::{random_unit, seeded_rng};
use lp::{Lp, LpOutcome};

pub use affine::AffineMap;
pub use hausdorff::{find_interior_point, local_hausdorff, truncated_support, HausdorffEstimate};
pub use segment::{detect_boundary_segment, BoundarySegment, SegmentOptions};

pub type Point = DVector<f64>;

/// Bracket cap beyond which an oracle ray is declared to be a recession direction.
pub const DEFAULT_RAY_CAP: f64 = 1e12;
/// Relative bisection tolerance for oracle ray exits.
pub const ORACLE_REL_TOL: f64 = 1e-12;

/// `{x : ⟨x, n_i⟩ < c_i}` with unit normals.
#[derive(Clone, Debug)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Point>,
    offsets: Vec<f64>,
    interior: Point,
}

impl HPolytope {
    pub fn new(normals: Vec<Point>, offsets: Vec<f64>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::InvalidBody("h-polytope needs at least one constraint".into()));
        }
        if normals.len() != offsets.len() {
            return Err(Error::InvalidBody(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        let dim = normals[0].len();
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        let mut ns = Vec::with_capacity(normals.len());
        let mut cs = Vec::with_capacity(normals.len());
        for (n, c) in normals.into_iter().zip(offsets) {
            if n.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: n.len(),
                });
            }
            let len = n.norm();
            if !(len > 0.0) || !len.is_finite() || !c.is_finite() {
                return Err(Error::InvalidBody("degenerate or non-finite constraint".into()));
            }
            ns.push(n / len);
            cs.push(c / len);
        }
        let interior = chebyshev_point(dim, &ns, &cs)?;
        Ok(Self {
            dim,
            normals: ns,
            offsets: cs,
            interior,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    fn inside(&self, x: &Point) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, c)| n.dot(x) < *c)
    }

    fn exit(&self, x: &Point, v: &Point) -> f64 {
        let mut t = f64::INFINITY;
        for (n, c) in self.normals.iter().zip(&self.offsets) {
            let nv = n.dot(v);
            if nv > 0.0 {
                t = t.min((c - n.dot(x)) / nv);
            }
        }
        t
    }

    fn support(&self, u: &Point) -> f64 {
        // Cheap exact answers before falling back to the LP.
        if self.dim == 1 {
            return self
                .normals
                .iter()
                .zip(&self.offsets)
                .filter(|(n, _)| n[0] * u[0] > 0.0)
                .map(|(n, c)| c / n[0] * u[0])
                .fold(f64::INFINITY, f64::min);
        }
        let lp = Lp {
            dim: self.dim,
            objective: u,
            slack_objective: 0.0,
            slack_bounds: (0.0, 0.0),
            le_rows: self
                .normals
                .iter()
                .zip(&self.offsets)
                .map(|(n, c)| (n, 0.0, *c))
                .collect(),
            eq_rows: Vec::new(),
        };
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Unbounded => f64::INFINITY,
            LpOutcome::Infeasible => f64::NAN,
        }
    }

    fn normal_at(&self, p: &Point) -> Point {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, (n, c)) in self.normals.iter().zip(&self.offsets).enumerate() {
            let v = n.dot(p) - c;
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        self.normals[best].clone()
    }
}

/// Point maximizing the common slack `s ≤ 1` of all constraints.
fn chebyshev_point(dim: usize, normals: &[Point], offsets: &[f64]) -> Result<Point> {
    let zero = DVector::zeros(dim);
    let lp = Lp {
        dim,
        objective: &zero,
        slack_objective: 1.0,
        slack_bounds: (f64::NEG_INFINITY, 1.0),
        le_rows: normals.iter().zip(offsets).map(|(n, c)| (n, 1.0, *c)).collect(),
        eq_rows: Vec::new(),
    };
    match lp.solve() {
        LpOutcome::Optimal { value, x } if value > 1e-12 => Ok(x),
        _ => Err(Error::InvalidBody("h-polytope has empty interior".into())),
    }
}

/// Interior of the convex hull of finitely many points.
#[derive(Clone, Debug)]
pub struct VPolytope {
    vertices: Vec<Point>,
    facets: HPolytope,
}

impl VPolytope {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidBody("v-polytope needs vertices".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        if vertices.len() < dim + 1 {
            return Err(Error::InvalidBody(format!(
                "v-polytope in dimension {dim} needs at least {} vertices",
                dim + 1
            )));
        }
        let scale = vertices.iter().map(|v| v.amax()).fold(1.0, f64::max);
        let diffs = DMatrix::from_fn(vertices.len() - 1, dim, |i, j| {
            vertices[i + 1][j] - vertices[0][j]
        });
        let sv = diffs.singular_values();
        if sv.iter().filter(|s| **s > 1e-10 * scale).count() < dim {
            return Err(Error::InvalidBody("v-polytope vertices are affinely dependent".into()));
        }
        let (normals, offsets) = enumerate_facets(&vertices, scale);
        let facets = HPolytope::new(normals, offsets)?;
        Ok(Self { vertices, facets })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Facet description of the hull.
    pub fn facets(&self) -> &HPolytope {
        &self.facets
    }

    fn support(&self, u: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn enumerate_facets(vertices: &[Point], scale: f64) -> (Vec<Point>, Vec<f64>) {
    let dim = vertices[0].len();
    let eps = 1e-10 * scale;
    let mut normals: Vec<Point> = Vec::new();
    let mut offsets: Vec<f64> = Vec::new();
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let base = &vertices[idx[0]];
        let mut m = DMatrix::zeros(dim, dim);
        for (r, &k) in idx.iter().enumerate().skip(1) {
            m.set_row(r - 1, &(&vertices[k] - base).transpose());
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested v_t");
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
        let nondegenerate = svd
            .singular_values
            .iter()
            .enumerate()
            .all(|(i, s)| i == imin || *s > eps);
        if nondegenerate {
            let mut n: Point = vt.row(imin).transpose();
            n /= n.norm();
            let mut c = n.dot(base);
            let (mut above, mut below) = (false, false);
            for v in vertices {
                let s = n.dot(v) - c;
                above |= s > eps;
                below |= s < -eps;
            }
            if above != below {
                if above {
                    n = -n;
                    c = -c;
                }
                let dup = normals
                    .iter()
                    .zip(&offsets)
                    .any(|(m, d)| (m - &n).amax() < 1e-9 && (d - c).abs() < 1e-9 * scale);
                if !dup {
                    normals.push(n);
                    offsets.push(c);
                }
            }
        }
        if !next_combination(&mut idx, vertices.len()) {
            break;
        }
    }
    (normals, offsets)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `{x : (x−c)ᵀ Q (x−c) < 1}`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    center: Point,
    shape: DMatrix<f64>,
    shape_inv: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: Point, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if d == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: shape.nrows(),
            });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidBody("ellipsoid shape is not symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidBody("ellipsoid shape is not positive definite".into()))?;
        let shape_inv = chol.inverse();
        Ok(Self {
            center,
            shape,
            shape_inv,
        })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    fn inside(&self, x: &Point) -> bool {
        let p = x - &self.center;
        (&self.shape * &p).dot(&p) < 1.0
    }

    fn exit(&self, x: &Point, v: &Point) -> f64 {
        let p = x - &self.center;
        let qv = &self.shape * v;
        let a = qv.dot(v);
        let b = qv.dot(&p);
        let c0 = (&self.shape * &p).dot(&p);
        let rem = 1.0 - c0;
        let disc = (b * b + a * rem).max(0.0);
        if b >= 0.0 {
            rem / (b + disc.sqrt())
        } else {
            (-b + disc.sqrt()) / a
        }
    }

    fn support(&self, u: &Point) -> f64 {
        self.center.dot(u) + (&self.shape_inv * u).dot(u).max(0.0).sqrt()
    }
}

type MembershipFn = dyn Fn(&Point) -> bool + Send + Sync;
type SupportFn = dyn Fn(&Point) -> f64 + Send + Sync;

/// Body known only through membership and support callbacks.
#[derive(Clone)]
pub struct SmoothOracle {
    dim: usize,
    membership: Arc<MembershipFn>,
    support: Arc<SupportFn>,
    /// Boundary resolution hint, used as the error scale of sampled answers.
    pub resolution: f64,
    pub ray_cap: f64,
    interior_hint: Option<Point>,
    pub name: String,
}

impl SmoothOracle {
    pub fn new(
        dim: usize,
        membership: impl Fn(&Point) -> bool + Send + Sync + 'static,
        support: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            membership: Arc::new(membership),
            support: Arc::new(support),
            resolution: 1e-12,
            ray_cap: DEFAULT_RAY_CAP,
            interior_hint: None,
            name: "oracle".into(),
        }
    }

    pub fn with_interior(mut self, p: Point) -> Self {
        self.interior_hint = Some(p);
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    fn exit(&self, x: &Point, v: &Point) -> f64 {
        let inside = |s: f64| (self.membership)(&(x + v * s));
        let mut hi = 1.0;
        let mut lo = 0.0;
        while inside(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > self.ray_cap {
                return f64::INFINITY;
            }
        }
        while hi - lo > ORACLE_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

impl fmt::Debug for SmoothOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothOracle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("resolution", &self.resolution)
            .finish()
    }
}

/// One factor of a product body acting on a subset of coordinates.
#[derive(Clone, Debug)]
pub struct Block {
    pub body: ConvexBody,
    pub coords: Vec<usize>,
}

/// Cartesian product of blocks; coordinates not covered by a block are free.
#[derive(Clone, Debug)]
pub struct ProductBody {
    dim: usize,
    blocks: Vec<Block>,
}

impl ProductBody {
    pub fn new(dim: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut used = vec![false; dim];
        for b in &blocks {
            if b.body.dim() != b.coords.len() {
                return Err(Error::DimensionMismatch {
                    expected: b.coords.len(),
                    got: b.body.dim(),
                });
            }
            for &c in &b.coords {
                if c >= dim || used[c] {
                    return Err(Error::InvalidBody(format!("bad product coordinate {c}")));
                }
                used[c] = true;
            }
        }
        Ok(Self { dim, blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn free_coords(&self) -> Vec<usize> {
        let mut used = vec![false; self.dim];
        for b in &self.blocks {
            for &c in &b.coords {
                used[c] = true;
            }
        }
        (0..self.dim).filter(|i| !used[*i]).collect()
    }
}

fn restrict(x: &Point, coords: &[usize]) -> Point {
    DVector::from_iterator(coords.len(), coords.iter().map(|&c| x[c]))
}

/// Result of a proper-convexity check.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperConvexity {
    pub proper: bool,
    /// Direction of a contained line when one was found.
    pub witness: Option<Point>,
    /// Number of sampled directions when the answer is a sampled certificate.
    pub sampled_directions: Option<usize>,
}

impl ProperConvexity {
    fn yes() -> Self {
        Self {
            proper: true,
            witness: None,
            sampled_directions: None,
        }
    }

    fn line(w: Point) -> Self {
        Self {
            proper: false,
            witness: Some(w),
            sampled_directions: None,
        }
    }
}

/// A convex open subset of real d-space.
#[derive(Clone, Debug)]
pub enum ConvexBody {
    HPolytope(HPolytope),
    VPolytope(VPolytope),
    Ellipsoid(Ellipsoid),
    Oracle(SmoothOracle),
    AffineImage {
        map: AffineMap,
        inner: Box<ConvexBody>,
    },
    Product(ProductBody),
}

impl ConvexBody {
    pub fn h_polytope(normals: Vec<Point>, offsets: Vec<f64>) -> Result<Self> {
        HPolytope::new(normals, offsets).map(Self::HPolytope)
    }

    pub fn v_polytope(vertices: Vec<Point>) -> Result<Self> {
        VPolytope::new(vertices).map(Self::VPolytope)
    }

    pub fn ellipsoid(center: Point, shape: DMatrix<f64>) -> Result<Self> {
        Ellipsoid::new(center, shape).map(Self::Ellipsoid)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody("radius must be positive".into()));
        }
        let d = center.len();
        Self::ellipsoid(center, DMatrix::identity(d, d) / (radius * radius))
    }

    /// `(−h, h)^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        let mut normals = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut n = DVector::zeros(dim);
                n[i] = s;
                normals.push(n);
            }
        }
        Self::h_polytope(normals, vec![half_width; 2 * dim])
    }

    pub fn oracle(o: SmoothOracle) -> Self {
        Self::Oracle(o)
    }

    pub fn product(dim: usize, blocks: Vec<Block>) -> Result<Self> {
        ProductBody::new(dim, blocks).map(Self::Product)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::HPolytope(p) => p.dim,
            Self::VPolytope(p) => p.facets.dim,
            Self::Ellipsoid(e) => e.center.len(),
            Self::Oracle(o) => o.dim,
            Self::AffineImage { map, .. } => map.dim(),
            Self::Product(p) => p.dim,
        }
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.inside(x))
    }

    /// Unchecked membership.
    pub(crate) fn inside(&self, x: &Point) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Self::HPolytope(p) => p.inside(x),
            Self::VPolytope(p) => p.facets.inside(x),
            Self::Ellipsoid(e) => e.inside(x),
            Self::Oracle(o) => (o.membership)(x),
            Self::AffineImage { map, inner } => inner.inside(&map.apply_inverse(x)),
            Self::Product(p) => p
                .blocks
                .iter()
                .all(|b| b.body.inside(&restrict(x, &b.coords))),
        }
    }

    /// `sup{s > 0 : x + s v ∈ body}`, `+∞` along recession directions.
    pub fn ray_exit(&self, x: &Point, v: &Point) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        if v.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroDirection);
        }
        if !self.inside(x) {
            return Err(Error::NotInterior);
        }
        Ok(self.exit(x, v))
    }

    /// Unchecked ray exit; `x` interior, `v` nonzero.
    pub(crate) fn exit(&self, x: &Point, v: &Point) -> f64 {
        match self {
            Self::HPolytope(p) => p.exit(x, v),
            Self::VPolytope(p) => p.facets.exit(x, v),
            Self::Ellipsoid(e) => e.exit(x, v),
            Self::Oracle(o) => o.exit(x, v),
            Self::AffineImage { map, inner } => {
                inner.exit(&map.apply_inverse(x), &map.apply_inverse_vector(v))
            }
            Self::Product(p) => {
                let mut t = f64::INFINITY;
                for b in &p.blocks {
                    let vs = restrict(v, &b.coords);
                    if vs.iter().any(|c| *c != 0.0) {
                        t = t.min(b.body.exit(&restrict(x, &b.coords), &vs));
                    }
                }
                t
            }
        }
    }

    /// `sup ⟨x, u⟩` over the body.
    pub fn support(&self, u: &Point) -> Result<f64> {
        self.check_dim(u)?;
        if u.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroDirection);
        }
        let h = self.h(u);
        if h.is_nan() {
            return Err(Error::Internal("support evaluation failed".into()));
        }
        Ok(h)
    }

    pub(crate) fn h(&self, u: &Point) -> f64 {
        match self {
            Self::HPolytope(p) => p.support(u),
            Self::VPolytope(p) => p.support(u),
            Self::Ellipsoid(e) => e.support(u),
            Self::Oracle(o) => (o.support)(u),
            Self::AffineImage { map, inner } => {
                let lu = map.linear().transpose() * u;
                let t = map.translation().dot(u);
                if lu.iter().all(|c| *c == 0.0) {
                    t
                } else {
                    inner.h(&lu) + t
                }
            }
            Self::Product(p) => {
                let mut covered = vec![false; p.dim];
                let mut total = 0.0;
                for b in &p.blocks {
                    let us = restrict(u, &b.coords);
                    for &c in &b.coords {
                        covered[c] = true;
                    }
                    if us.iter().any(|c| *c != 0.0) {
                        total += b.body.h(&us);
                    }
                }
                if (0..p.dim).any(|i| !covered[i] && u[i] != 0.0) {
                    f64::INFINITY
                } else {
                    total
                }
            }
        }
    }

    /// Outward unit normal of a supporting hyperplane at a (near-)boundary point.
    /// `None` for oracle bodies, which expose no normals.
    pub fn normal_at(&self, p: &Point) -> Option<Point> {
        if p.len() != self.dim() {
            return None;
        }
        match self {
            Self::HPolytope(h) => Some(h.normal_at(p)),
            Self::VPolytope(v) => Some(v.facets.normal_at(p)),
            Self::Ellipsoid(e) => {
                let g = &e.shape * (p - &e.center);
                let n = g.norm();
                (n > 0.0).then(|| g / n)
            }
            Self::Oracle(_) => None,
            Self::AffineImage { map, inner } => {
                let n = inner.normal_at(&map.apply_inverse(p))?;
                let m = map.linear_inverse().transpose() * n;
                let len = m.norm();
                (len > 0.0).then(|| m / len)
            }
            Self::Product(prod) => {
                let mut best: Option<(f64, Point)> = None;
                for b in &prod.blocks {
                    let ps = restrict(p, &b.coords);
                    if let Some(n) = b.body.normal_at(&ps) {
                        let slack = (b.body.h(&n) - n.dot(&ps)).abs();
                        if best.as_ref().is_none_or(|(s, _)| slack < *s) {
                            let mut full = DVector::zeros(prod.dim);
                            for (k, &c) in b.coords.iter().enumerate() {
                                full[c] = n[k];
                            }
                            best = Some((slack, full));
                        }
                    }
                }
                best.map(|(_, n)| n)
            }
        }
    }

    /// A point of the body, if one is known or can be found cheaply.
    pub fn interior_point(&self) -> Option<Point> {
        match self {
            Self::HPolytope(p) => Some(p.interior.clone()),
            Self::VPolytope(p) => {
                let n = p.vertices.len() as f64;
                Some(p.vertices.iter().fold(DVector::zeros(p.facets.dim), |a, v| a + v) / n)
            }
            Self::Ellipsoid(e) => Some(e.center.clone()),
            Self::Oracle(o) => o
                .interior_hint
                .clone()
                .or_else(|| find_interior_point(self, 1e6).ok()),
            Self::AffineImage { map, inner } => inner.interior_point().map(|q| map.apply(&q)),
            Self::Product(p) => {
                let mut x = DVector::zeros(p.dim);
                for b in &p.blocks {
                    let q = b.body.interior_point()?;
                    for (k, &c) in b.coords.iter().enumerate() {
                        x[c] = q[k];
                    }
                }
                Some(x)
            }
        }
    }

    /// Relative accuracy of ray exits: zero for exact representations.
    pub fn exit_tolerance(&self) -> f64 {
        match self {
            Self::HPolytope(_) | Self::VPolytope(_) | Self::Ellipsoid(_) => 0.0,
            Self::Oracle(_) => ORACLE_REL_TOL,
            Self::AffineImage { inner, .. } => inner.exit_tolerance(),
            Self::Product(p) => p
                .blocks
                .iter()
                .map(|b| b.body.exit_tolerance())
                .fold(0.0, f64::max),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exit_tolerance() == 0.0
    }

    /// Whether the body contains no full affine line.
    pub fn is_properly_convex(&self) -> ProperConvexity {
        match self {
            Self::HPolytope(p) => {
                let d = p.dim;
                let mut g = DMatrix::<f64>::zeros(d, d);
                for n in &p.normals {
                    g += n * n.transpose();
                }
                let eig = g.symmetric_eigen();
                let (imin, lmin) = eig
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |a, (i, l)| if *l < a.1 { (i, *l) } else { a });
                if lmin > 1e-12 * (p.normals.len() as f64) {
                    ProperConvexity::yes()
                } else {
                    ProperConvexity::line(eig.eigenvectors.column(imin).into_owned())
                }
            }
            Self::VPolytope(_) | Self::Ellipsoid(_) => ProperConvexity::yes(),
            Self::Oracle(o) => {
                let Some(q) = self.interior_point() else {
                    return ProperConvexity {
                        proper: true,
                        witness: None,
                        sampled_directions: Some(0),
                    };
                };
                let d = o.dim;
                let mut dirs: Vec<Point> = (0..d)
                    .map(|i| {
                        let mut e = DVector::zeros(d);
                        e[i] = 1.0;
                        e
                    })
                    .collect();
                let mut rng = seeded_rng(0x6c69_6e65);
                while dirs.len() < 2 * d + 32 {
                    dirs.push(random_unit(&mut rng, d));
                }
                for u in &dirs {
                    if o.exit(&q, u).is_infinite() && o.exit(&q, &-u).is_infinite() {
                        return ProperConvexity::line(u.clone());
                    }
                }
                ProperConvexity {
                    proper: true,
                    witness: None,
                    sampled_directions: Some(dirs.len()),
                }
            }
            Self::AffineImage { map, inner } => {
                let mut r = inner.is_properly_convex();
                if let Some(w) = r.witness.take() {
                    let m = map.apply_vector(&w);
                    r.witness = Some(&m / m.norm());
                }
                r
            }
            Self::Product(p) => {
                if let Some(&c) = p.free_coords().first() {
                    let mut e = DVector::zeros(p.dim);
                    e[c] = 1.0;
                    return ProperConvexity::line(e);
                }
                let mut sampled = None;
                for b in &p.blocks {
                    let r = b.body.is_properly_convex();
                    if !r.proper {
                        let mut e = DVector::zeros(p.dim);
                        if let Some(w) = r.witness {
                            for (k, &c) in b.coords.iter().enumerate() {
                                e[c] = w[k];
                            }
                        }
                        return ProperConvexity {
                            proper: false,
                            witness: Some(e),
                            sampled_directions: r.sampled_directions,
                        };
                    }
                    if let Some(n) = r.sampled_directions {
                        sampled = Some(sampled.unwrap_or(0) + n);
                    }
                }
                ProperConvexity {
                    proper: true,
                    witness: None,
                    sampled_directions: sampled,
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            self.h(&e).is_finite() && self.h(&-e).is_finite()
        })
    }

    /// Image under an invertible affine map. Exact representations are rewritten.
    pub fn apply_affine(&self, map: &AffineMap) -> Result<ConvexBody> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: map.dim(),
            });
        }
        match self {
            Self::HPolytope(p) => {
                let lit = map.linear_inverse().transpose();
                let mut normals = Vec::with_capacity(p.normals.len());
                let mut offsets = Vec::with_capacity(p.normals.len());
                for (n, c) in p.normals.iter().zip(&p.offsets) {
                    let m = &lit * n;
                    offsets.push(c + m.dot(map.translation()));
                    normals.push(m);
                }
                Self::h_polytope(normals, offsets)
            }
            Self::VPolytope(p) => Self::v_polytope(p.vertices.iter().map(|v| map.apply(v)).collect()),
            Self::Ellipsoid(e) => {
                let li = map.linear_inverse();
                let q = li.transpose() * &e.shape * li;
                let q = (&q + q.transpose()) * 0.5;
                Self::ellipsoid(map.apply(&e.center), q)
            }
            Self::AffineImage { map: inner_map, inner } => Ok(Self::AffineImage {
                map: map.compose(inner_map),
                inner: inner.clone(),
            }),
            Self::Oracle(_) | Self::Product(_) => Ok(Self::AffineImage {
                map: map.clone(),
                inner: Box::new(self.clone()),
            }),
        }
    }
}

/// `A · body`.
pub fn apply_affine(map: &AffineMap, body: &ConvexBody) -> Result<ConvexBody> {
    body.apply_affine(map)
}

/// A body together with a chosen interior basepoint.
#[derive(Clone, Debug)]
pub struct PointedBody {
    pub body: ConvexBody,
    pub basepoint: Point,
}

impl PointedBody {
    pub fn new(body: ConvexBody, basepoint: Point) -> Result<Self> {
        if !body.contains(&basepoint)? {
            return Err(Error::NotInterior);
        }
        Ok(Self { body, basepoint })
    }

    pub fn apply_affine(&self, map: &AffineMap) -> Result<Self> {
        Self::new(self.body.apply_affine(map)?, map.apply(&self.basepoint))
    }
}
