//! Four-point and thin-triangle hyperbolicity estimates.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::Point;
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpaceView;
use crate::net::{random_unit, seeded_rng, SeededRng};

/// Symmetric distance matrix, point-valued or interval-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSample {
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    exact: bool,
}

impl MetricSample {
    /// From a full matrix; the diagonal must vanish and symmetry must be exact.
    pub fn from_matrix(d: &[Vec<f64>]) -> Result<Self> {
        let n = d.len();
        if d.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("distance matrix must be square".into()));
        }
        let flat: Vec<f64> = d.iter().flatten().copied().collect();
        Self::validated(n, flat.clone(), flat, true)
    }

    /// Evaluates `dist` once per unordered pair.
    pub fn from_fn<P>(points: &[P], dist: impl Fn(&P, &P) -> Result<f64>) -> Result<Self> {
        let n = points.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(&points[i], &points[j])?;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        Self::validated(n, m.clone(), m, true)
    }

    /// Interval-valued sample; `dist` returns `(lo, hi)`.
    pub fn from_interval_fn<P>(
        points: &[P],
        dist: impl Fn(&P, &P) -> Result<(f64, f64)>,
    ) -> Result<Self> {
        let n = points.len();
        let mut lo = vec![0.0; n * n];
        let mut hi = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let (l, h) = dist(&points[i], &points[j])?;
                lo[i * n + j] = l;
                lo[j * n + i] = l;
                hi[i * n + j] = h;
                hi[j * n + i] = h;
            }
        }
        Self::validated(n, lo, hi, false)
    }

    pub fn from_interval_matrices(lo: &[Vec<f64>], hi: &[Vec<f64>]) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || lo.iter().chain(hi).any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("interval matrices must be square and equal-sized".into()));
        }
        Self::validated(
            n,
            lo.iter().flatten().copied().collect(),
            hi.iter().flatten().copied().collect(),
            false,
        )
    }

    fn validated(n: usize, lo: Vec<f64>, hi: Vec<f64>, exact: bool) -> Result<Self> {
        for i in 0..n {
            if lo[i * n + i] != 0.0 || hi[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument("distance matrix diagonal must be zero".into()));
            }
            for j in 0..n {
                let (l, h) = (lo[i * n + j], hi[i * n + j]);
                if l != lo[j * n + i] || h != hi[j * n + i] {
                    return Err(Error::InvalidArgument("distance matrix must be symmetric".into()));
                }
                if !(l >= 0.0) || !(h >= l) || !h.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "bad distance entry ({i},{j}): [{l}, {h}]"
                    )));
                }
            }
        }
        Ok(Self { n, lo, hi, exact })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn lo(&self, i: usize, j: usize) -> f64 {
        self.lo[i * self.n + j]
    }

    pub fn hi(&self, i: usize, j: usize) -> f64 {
        self.hi[i * self.n + j]
    }

    /// Certified and optimistic values of `min{(x|z)_o, (z|y)_o} − (x|y)_o`.
    fn quad_value(&self, q: [usize; 4]) -> (f64, f64) {
        let [o, x, y, z] = q;
        let gp_lo = |a: usize, b: usize| 0.5 * (self.lo(o, a) + self.lo(o, b) - self.hi(a, b));
        let gp_hi = |a: usize, b: usize| 0.5 * (self.hi(o, a) + self.hi(o, b) - self.lo(a, b));
        let v_lo = gp_lo(x, z).min(gp_lo(z, y)) - gp_hi(x, y);
        if self.exact {
            return (v_lo, v_lo);
        }
        let v_hi = gp_hi(x, z).min(gp_hi(z, y)) - gp_lo(x, y);
        (v_lo, v_hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Exhaustive,
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicityReport {
    /// Certified four-point constant (equals the point value for exact samples).
    pub alpha: f64,
    /// Optimistic bound from the same scan; equals `alpha` for exact samples.
    pub alpha_hi: f64,
    pub witness: [usize; 4],
    pub n_quadruples: u64,
    pub mode: ScanMode,
}

fn better(a: (f64, [usize; 4]), b: (f64, [usize; 4])) -> (f64, [usize; 4]) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Largest four-point defect over ordered quadruples `(o, x, y, z)`.
///
/// Exhaustive mode includes quadruples with repeated indices, so the result is
/// exactly invariant under relabeling and under duplicating a point.
pub fn four_point_alpha(sample: &MetricSample, budget: Budget, seed: u64) -> Result<HyperbolicityReport> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    match budget {
        Budget::Exhaustive => {
            let per_o: Vec<((f64, [usize; 4]), f64)> = (0..n)
                .into_par_iter()
                .map(|o| {
                    let mut best = (f64::NEG_INFINITY, [usize::MAX; 4]);
                    let mut best_hi = f64::NEG_INFINITY;
                    for x in 0..n {
                        for y in 0..n {
                            for z in 0..n {
                                let q = [o, x, y, z];
                                let (lo, hi) = sample.quad_value(q);
                                if lo > best.0 {
                                    best = (lo, q);
                                }
                                best_hi = best_hi.max(hi);
                            }
                        }
                    }
                    (best, best_hi)
                })
                .collect();
            let mut best = (f64::NEG_INFINITY, [usize::MAX; 4]);
            let mut best_hi = f64::NEG_INFINITY;
            for (b, h) in per_o {
                best = better(best, b);
                best_hi = best_hi.max(h);
            }
            Ok(HyperbolicityReport {
                alpha: best.0.max(0.0),
                alpha_hi: best_hi.max(0.0),
                witness: best.1,
                n_quadruples: (n as u64).pow(4),
                mode: ScanMode::Exhaustive,
            })
        }
        Budget::Sampled(count) => {
            if count == 0 {
                return Err(Error::InvalidArgument("sampled budget must be positive".into()));
            }
            let mut rng = seeded_rng(seed);
            let mut best = (f64::NEG_INFINITY, [usize::MAX; 4]);
            let mut best_hi = f64::NEG_INFINITY;
            for _ in 0..count {
                let q = [
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                ];
                let (lo, hi) = sample.quad_value(q);
                best = better(best, (lo, q));
                best_hi = best_hi.max(hi);
            }
            Ok(HyperbolicityReport {
                alpha: best.0.max(0.0),
                alpha_hi: best_hi.max(0.0),
                witness: best.1,
                n_quadruples: count as u64,
                mode: ScanMode::Sampled,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThinTriangle {
    /// Largest sampled distance from a point of one side to the other two sides.
    pub delta: f64,
    /// `delta` minus the discretization slack, clamped at zero.
    pub lower_bound: f64,
}

/// Thinness of one geodesic triangle by dense sampling of its sides.
pub fn thin_triangle_delta<P, G, D>(
    geodesic: G,
    dist: D,
    triangle: [&P; 3],
    resolution: f64,
) -> Result<ThinTriangle>
where
    P: Clone,
    G: Fn(&P, &P, f64) -> Result<P>,
    D: Fn(&P, &P) -> Result<f64>,
{
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let mut sides: Vec<Vec<P>> = Vec::with_capacity(3);
    for k in 0..3 {
        let (a, b) = (triangle[k], triangle[(k + 1) % 3]);
        let len = dist(a, b)?;
        if len == 0.0 {
            sides.push(vec![a.clone()]);
            continue;
        }
        let mid = geodesic(a, b, 0.5 * len)?;
        let defect = (dist(a, &mid)? + dist(&mid, b)? - len).abs();
        if defect > 1e-6 * len.max(1.0) {
            return Err(Error::InconsistentOracle { defect });
        }
        let steps = (len / resolution).ceil().max(1.0) as usize;
        let mut pts = Vec::with_capacity(steps + 1);
        pts.push(a.clone());
        for i in 1..steps {
            pts.push(geodesic(a, b, len * i as f64 / steps as f64)?);
        }
        pts.push(b.clone());
        sides.push(pts);
    }
    let mut delta = 0.0f64;
    for k in 0..3 {
        for u in &sides[k] {
            let mut near = f64::INFINITY;
            for other in [(k + 1) % 3, (k + 2) % 3] {
                for p in &sides[other] {
                    near = near.min(dist(u, p)?);
                    if near <= delta {
                        break;
                    }
                }
            }
            delta = delta.max(near);
        }
    }
    Ok(ThinTriangle {
        delta,
        lower_bound: (delta - 0.5 * resolution).max(0.0),
    })
}

/// A space from which points within a given distance of a basepoint can be drawn.
pub trait ProfileSpace: Sync {
    type Point: Clone + Send + Sync;
    fn sample_within(&self, scale: f64, rng: &mut SeededRng) -> Result<Self::Point>;
    /// Distance bounds `(lo, hi)`; equal for exact metrics.
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<(f64, f64)>;
}

/// Hilbert geometry sampled by shooting geodesics from a basepoint.
pub struct HilbertProfile {
    pub view: HilbertSpaceView,
    pub basepoint: Point,
}

impl ProfileSpace for HilbertProfile {
    type Point = Point;

    fn sample_within(&self, scale: f64, rng: &mut SeededRng) -> Result<Point> {
        let w = random_unit(rng, self.view.dim());
        let r = scale * rng.random::<f64>();
        self.view.shoot(&self.basepoint, &w, r)
    }

    fn distance(&self, a: &Point, b: &Point) -> Result<(f64, f64)> {
        let d = self.view.distance(a, b)?;
        Ok((d, d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub scale: f64,
    pub n_points: usize,
    pub n_quadruples: u64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingProfile {
    pub rows: Vec<ProfileRow>,
    /// Least-squares slope of `alpha_lo` against scale.
    pub slope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileOptions {
    pub points_per_scale: usize,
    pub budget: Budget,
    pub seed: u64,
}

/// Four-point alpha of seeded samples at each scale, with a fitted slope.
pub fn delta_scaling_profile<S: ProfileSpace>(
    space: &S,
    scales: &[f64],
    opts: &ProfileOptions,
) -> Result<ScalingProfile> {
    if scales.is_empty() {
        return Err(Error::InvalidArgument("need at least one scale".into()));
    }
    if scales.iter().any(|s| !(*s > 0.0)) || scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("scales must be positive and increasing".into()));
    }
    if opts.points_per_scale < 4 {
        return Err(Error::TooFewPoints(opts.points_per_scale));
    }
    let rows = scales
        .par_iter()
        .enumerate()
        .map(|(k, &s)| -> Result<ProfileRow> {
            let row_seed = opts.seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let mut rng = seeded_rng(row_seed);
            let pts = (0..opts.points_per_scale)
                .map(|_| space.sample_within(s, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let sample = MetricSample::from_interval_fn(&pts, |a, b| space.distance(a, b))?;
            let rep = four_point_alpha(&sample, opts.budget, row_seed.rotate_left(17))?;
            Ok(ProfileRow {
                scale: s,
                n_points: pts.len(),
                n_quadruples: rep.n_quadruples,
                alpha_lo: rep.alpha,
                alpha_hi: rep.alpha_hi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.scale).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.alpha_lo).collect();
    Ok(ScalingProfile {
        slope: least_squares_slope(&xs, &ys),
        rows,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> MetricSample {
        // centre 0, leaves 1..3 at distance 1
        let mut d = vec![vec![2.0; 4]; 4];
        for i in 0..4 {
            d[i][i] = 0.0;
        }
        for i in 1..4 {
            d[0][i] = 1.0;
            d[i][0] = 1.0;
        }
        MetricSample::from_matrix(&d).unwrap()
    }

    #[test]
    fn tree_is_zero_hyperbolic() {
        let r = four_point_alpha(&star(), Budget::Exhaustive, 0).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert_eq!(r.witness, [0, 0, 0, 0]);
        assert_eq!(r.n_quadruples, 256);
    }

    #[test]
    fn equidistant_points() {
        let mut d = vec![vec![3.0; 4]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        let r = four_point_alpha(&MetricSample::from_matrix(&d).unwrap(), Budget::Exhaustive, 0).unwrap();
        assert_eq!(r.alpha, 0.0);
    }

    #[test]
    fn square_corners() {
        let s = 2.0f64;
        let pts = [[0.0, 0.0], [s, 0.0], [0.0, s], [s, s]];
        let sample = MetricSample::from_fn(&pts, |a, b| {
            Ok(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
        })
        .unwrap();
        let r = four_point_alpha(&sample, Budget::Exhaustive, 0).unwrap();
        assert!(r.alpha >= s * (2f64.sqrt() - 1.0) - 1e-12);
    }

    #[test]
    fn too_few_points() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let s = MetricSample::from_matrix(&d).unwrap();
        assert_eq!(four_point_alpha(&s, Budget::Exhaustive, 0), Err(Error::TooFewPoints(2)));
    }

    #[test]
    fn interval_bounds_bracket_point_value() {
        let s = 1.0f64;
        let pts = [[0.0, 0.0], [s, 0.0], [0.0, s], [s, s], [0.5, 0.2]];
        let e = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let exact = MetricSample::from_fn(&pts, |a, b| Ok(e(a, b))).unwrap();
        let iv = MetricSample::from_interval_fn(&pts, |a, b| Ok((0.99 * e(a, b), 1.01 * e(a, b)))).unwrap();
        let a = four_point_alpha(&exact, Budget::Exhaustive, 0).unwrap().alpha;
        let r = four_point_alpha(&iv, Budget::Exhaustive, 0).unwrap();
        assert!(r.alpha <= a && a <= r.alpha_hi);
        assert!(r.alpha < r.alpha_hi);
    }

    #[test]
    fn degenerate_triangle_is_thin() {
        let geo = |a: &f64, b: &f64, s: f64| Ok(a + (b - a).signum() * s);
        let d = |a: &f64, b: &f64| Ok((a - b).abs());
        let t = thin_triangle_delta(geo, d, [&0.0, &4.0, &1.5], 0.01).unwrap();
        assert!(t.delta < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        assert!((least_squares_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-15);
    }
}
