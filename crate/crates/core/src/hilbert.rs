//! Hilbert distance, segment geodesics and Gromov products on convex bodies.

use crate::convex::{ConvexBody, Point};
use crate::error::{Error, Result};

/// A properly convex body viewed as a Hilbert metric space.
#[derive(Clone, Debug)]
pub struct HilbertSpaceView {
    body: ConvexBody,
}

/// Distance value with an error bound propagated from ray-exit accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HilbertValue {
    pub value: f64,
    pub error_bound: f64,
}

impl HilbertSpaceView {
    pub fn new(body: ConvexBody) -> Result<Self> {
        let pc = body.is_properly_convex();
        if !pc.proper {
            return Err(Error::NotProperlyConvex {
                witness: pc.witness.map(|w| w.iter().copied().collect()),
            });
        }
        Ok(Self { body })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    fn check(&self, x: &Point) -> Result<()> {
        if !self.body.contains(x)? {
            return Err(Error::NotInterior);
        }
        Ok(())
    }

    /// Exit parameters `(A, B')` behind `x` and beyond `y` along `y − x`, in units of `y − x`.
    fn endpoints(&self, x: &Point, y: &Point) -> Result<(f64, f64)> {
        let v = y - x;
        let a = self.body.exit(x, &-&v);
        let b = self.body.exit(y, &v);
        if a.is_infinite() && b.is_infinite() {
            return Err(Error::Internal(
                "both Hilbert endpoints infinite on a properly convex body".into(),
            ));
        }
        Ok((a, b))
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.distance_with_error(x, y)?.value)
    }

    /// `½ log` of the cross-ratio; an infinite endpoint contributes a factor 1.
    pub fn distance_with_error(&self, x: &Point, y: &Point) -> Result<HilbertValue> {
        self.check(x)?;
        self.check(y)?;
        if degenerate(x, y) {
            return Ok(HilbertValue {
                value: 0.0,
                error_bound: 0.0,
            });
        }
        let (a, b) = self.endpoints(x, y)?;
        let value = 0.5 * (term(b) + term(a));
        let tol = self.body.exit_tolerance();
        let err = |t: f64| if t.is_finite() { tol / (1.0 + t) } else { 0.0 };
        Ok(HilbertValue {
            value,
            error_bound: 0.5 * (err(a) + err(b)),
        })
    }

    /// Point on the segment `[x, y]` at Hilbert distance `s` from `x`.
    pub fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        self.check(x)?;
        self.check(y)?;
        if degenerate(x, y) {
            return Err(Error::InvalidArgument("geodesic endpoints coincide".into()));
        }
        let total = self.distance(x, y)?;
        if !(s >= 0.0) || s > total * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::InvalidArgument(format!(
                "arclength {s} outside [0, {total}]"
            )));
        }
        if s == 0.0 {
            return Ok(x.clone());
        }
        if s >= total {
            return Ok(y.clone());
        }
        let (a, bp) = self.endpoints(x, y)?;
        let lambda = segment_parameter(a, 1.0 + bp, s);
        Ok(x + (y - x) * lambda)
    }

    /// Point at Hilbert distance `r` from `p` along direction `w`.
    pub fn shoot(&self, p: &Point, w: &Point, r: f64) -> Result<Point> {
        self.check(p)?;
        if w.iter().all(|c| *c == 0.0) {
            return Err(Error::ZeroDirection);
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument("shooting radius must be finite and nonnegative".into()));
        }
        if r == 0.0 {
            return Ok(p.clone());
        }
        let a = self.body.exit(p, &-w);
        let b = self.body.exit(p, w);
        if a.is_infinite() && b.is_infinite() {
            return Err(Error::Internal("body contains a line through the basepoint".into()));
        }
        let q = p + w * segment_parameter(a, b, r);
        if !self.body.inside(&q) {
            return Err(Error::Internal("shot point left the body".into()));
        }
        Ok(q)
    }
}

fn degenerate(x: &Point, y: &Point) -> bool {
    (x - y).norm() < 1e-14 * (1.0 + x.norm().max(y.norm()))
}

fn term(t: f64) -> f64 {
    if t.is_infinite() {
        0.0
    } else {
        (1.0 / t).ln_1p()
    }
}

/// Segment parameter `λ` with `H(x, x + λ v) = s`, for endpoints at `−A` and `B` along `v`.
fn segment_parameter(a: f64, b: f64, s: f64) -> f64 {
    let e = (-2.0 * s).exp();
    let m = -(-2.0 * s).exp_m1();
    match (a.is_finite(), b.is_finite()) {
        (true, true) => a * b * m / (a + b * e),
        (true, false) => a * (2.0 * s).exp_m1(),
        (false, true) => b * m,
        (false, false) => f64::NAN,
    }
}

pub fn hilbert_distance(view: &HilbertSpaceView, x: &Point, y: &Point) -> Result<f64> {
    view.distance(x, y)
}

pub fn geodesic_point(view: &HilbertSpaceView, x: &Point, y: &Point, s: f64) -> Result<Point> {
    view.geodesic_point(x, y, s)
}

/// `(x|y)_o = ½(d(o,x) + d(o,y) − d(x,y))`.
pub fn gromov_product<P, D>(d: D, o: &P, x: &P, y: &P) -> f64
where
    D: Fn(&P, &P) -> f64,
{
    0.5 * (d(o, x) + d(o, y) - d(x, y))
}
