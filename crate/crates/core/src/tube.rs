//! Experiments on tube domains `C + iR^d`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::{find_interior_point, ConvexBody, Point, PointedBody};
use crate::error::{Error, Result};
use crate::hilbert::HilbertSpaceView;
use crate::hyperbolicity::{
    delta_scaling_profile, four_point_alpha, least_squares_slope, Budget, HilbertProfile, MetricSample,
    ProfileOptions, ScalingProfile,
};
use crate::kobayashi::{disk_distance, kobayashi_interval, strip_distance, CPoint, ComplexConvexDomain, KobayashiBudget};
use crate::net::{random_unit, seeded_rng, NetOptions};
use crate::rescaling::{blowup_sequence, limit_strictness_verdict, orbit_limit, BlowupSpec, Normalization};

/// Tube over a properly convex base.
#[derive(Clone, Debug)]
pub struct TubeDomain {
    base: ConvexBody,
    domain: ComplexConvexDomain,
}

impl TubeDomain {
    pub fn new(base: ConvexBody) -> Result<Self> {
        let pc = base.is_properly_convex();
        if !pc.proper {
            return Err(Error::NotProperlyConvex {
                witness: pc.witness.map(|w| w.iter().copied().collect()),
            });
        }
        let domain = ComplexConvexDomain::tube(base.clone())?;
        Ok(Self { base, domain })
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn domain(&self) -> &ComplexConvexDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `c0 + i y`.
    pub fn fiber_point(&self, c0: &Point, y: &Point) -> CPoint {
        c0.iter().zip(y.iter()).map(|(x, y)| Complex64::new(*x, *y)).collect()
    }
}

/// Exact distance on the tube over `(−1, 1)^d`, a product of strips.
pub fn cube_tube_exact(z: &[Complex64], w: &[Complex64]) -> Result<f64> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: w.len(),
        });
    }
    if z.iter().chain(w).any(|c| !(c.re.abs() < 1.0)) {
        return Err(Error::OutsideDomain);
    }
    Ok(z.iter()
        .zip(w)
        .map(|(a, b)| strip_distance(-1.0, 1.0, *a, *b))
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlatRow {
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
    pub lo_ratio: f64,
    pub hi_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatProfile {
    pub rows: Vec<FlatRow>,
    /// `[min lo/T, max hi/T]` when it is a positive finite band.
    pub band: Option<(f64, f64)>,
}

/// Kobayashi brackets between `c0` and `c0 + iT·u` for each `T`.
pub fn flat_embedding_profile(
    tube: &TubeDomain,
    c0: &Point,
    u: &Point,
    ts: &[f64],
    budget: &KobayashiBudget,
) -> Result<FlatProfile> {
    let d = tube.dim();
    if c0.len() != d || u.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: c0.len().max(u.len()),
        });
    }
    if !tube.base.inside(c0) {
        return Err(Error::NotInterior);
    }
    let un = u.norm();
    if !(un > 0.0) {
        return Err(Error::ZeroDirection);
    }
    let u = u / un;
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("T values must be positive and increasing".into()));
    }
    let z = tube.fiber_point(c0, &DVector::zeros(d));
    let rows = ts
        .par_iter()
        .map(|&t| -> Result<FlatRow> {
            let w = tube.fiber_point(c0, &(&u * t));
            let iv = kobayashi_interval(&tube.domain, &z, &w, budget)?;
            Ok(FlatRow {
                t,
                lo: iv.lo,
                hi: iv.hi,
                lo_ratio: iv.lo / t,
                hi_ratio: iv.hi / t,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = rows.iter().map(|r| r.lo_ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.hi_ratio).fold(0.0, f64::max);
    let band = (lo > 0.0 && hi.is_finite()).then_some((lo, hi));
    Ok(FlatProfile { rows, band })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FiberAlpha {
    pub scale: f64,
    /// Certified (pessimistic) four-point constant.
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

pub const FIBER_GRID: usize = 5;

/// Exhaustive four-point alpha of `{c0 + i y}` for `y` on a 5×5 grid of side `s`
/// spanning the first two coordinates.
pub fn fiber_grid_alpha(tube: &TubeDomain, c0: &Point, s: f64, budget: &KobayashiBudget) -> Result<FiberAlpha> {
    let d = tube.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("fiber grid needs a base of dimension at least 2".into()));
    }
    if c0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: c0.len() });
    }
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("grid side must be positive".into()));
    }
    let step = s / (FIBER_GRID - 1) as f64;
    let pts: Vec<CPoint> = (0..FIBER_GRID * FIBER_GRID)
        .map(|k| {
            let mut y = DVector::zeros(d);
            y[0] = (k / FIBER_GRID) as f64 * step;
            y[1] = (k % FIBER_GRID) as f64 * step;
            tube.fiber_point(c0, &y)
        })
        .collect();
    let n = pts.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let ivs = pairs
        .par_iter()
        .map(|&(i, j)| kobayashi_interval(&tube.domain, &pts[i], &pts[j], budget))
        .collect::<Result<Vec<_>>>()?;
    let mut lo = vec![vec![0.0; n]; n];
    let mut hi = vec![vec![0.0; n]; n];
    for ((i, j), iv) in pairs.iter().zip(&ivs) {
        lo[*i][*j] = iv.lo;
        lo[*j][*i] = iv.lo;
        hi[*i][*j] = iv.hi;
        hi[*j][*i] = iv.hi;
    }
    let sample = MetricSample::from_interval_matrices(&lo, &hi)?;
    let rep = four_point_alpha(&sample, Budget::Exhaustive, 0)?;
    Ok(FiberAlpha {
        scale: s,
        alpha_lo: rep.alpha,
        alpha_hi: rep.alpha_hi,
    })
}

/// Asymptotic embedding of the bidisk into the tube over the square at the vertex `(1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingExperiment {
    pub n_values: Vec<u32>,
    pub grid: Vec<[Complex64; 2]>,
}

impl EmbeddingExperiment {
    pub fn new(n_values: Vec<u32>, grid: Vec<[Complex64; 2]>) -> Result<Self> {
        if n_values.is_empty() || n_values.iter().any(|n| *n < 2) {
            return Err(Error::InvalidArgument("n values must be at least 2".into()));
        }
        if grid.is_empty() {
            return Err(Error::InvalidArgument("empty grid".into()));
        }
        if grid.iter().flatten().any(|c| !(c.norm() < 1.0)) {
            return Err(Error::OutsideDomain);
        }
        Ok(Self { n_values, grid })
    }

    /// `{0, 0.5, −0.4+0.3i, 0.3−0.6i, −0.7i}²` with `n ∈ {4, 16, 64, 256}`.
    pub fn standard() -> Self {
        let g1 = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.4, 0.3),
            Complex64::new(0.3, -0.6),
            Complex64::new(0.0, -0.7),
        ];
        let grid = g1.iter().flat_map(|a| g1.iter().map(move |b| [*a, *b])).collect();
        Self {
            n_values: vec![4, 16, 64, 256],
            grid,
        }
    }
}

/// `f_n(z) = (1, 1) + f(r_n z)/n` with `f(z) = −(1 + z)/(1 − z)` and `r_n = 1 − 1/n`.
pub fn embed_point(n: u32, z: &[Complex64; 2]) -> [Complex64; 2] {
    let nf = n as f64;
    let r = 1.0 - 1.0 / nf;
    let one = Complex64::new(1.0, 0.0);
    z.map(|c| {
        let rc = c * r;
        one - (one + rc) / (one - rc) / nf
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymRow {
    pub n: u32,
    /// Largest `|K_Ω(f_n z, f_n w) − K_{D²}(z, w)|` over grid pairs.
    pub error: f64,
}

pub fn asym_embedding_experiment(exp: &EmbeddingExperiment) -> Result<Vec<AsymRow>> {
    let exp = EmbeddingExperiment::new(exp.n_values.clone(), exp.grid.clone())?;
    let g = &exp.grid;
    exp.n_values
        .par_iter()
        .map(|&n| -> Result<AsymRow> {
            let imgs: Vec<[Complex64; 2]> = g.iter().map(|z| embed_point(n, z)).collect();
            let mut worst = 0.0f64;
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    let k_omega = cube_tube_exact(&imgs[i], &imgs[j])
                        .map_err(|_| Error::Internal(format!("f_{n} left the tube")))?;
                    let k_bidisk = disk_distance(g[i][0], g[j][0]).max(disk_distance(g[i][1], g[j][1]));
                    worst = worst.max((k_omega - k_bidisk).abs());
                }
            }
            Ok(AsymRow { n, error: worst })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DashboardConfig {
    pub seed: u64,
    pub scales: Vec<f64>,
    pub points_per_scale: usize,
    pub quadruples: usize,
    /// Indicator (a) holds when the fitted alpha slope is at most this.
    pub alpha_slope_max: f64,
    pub flat_t: Vec<f64>,
    pub fiber_scales: Vec<f64>,
    /// Indicator (b) needs the fitted slope of fiber alpha against `s` to reach this.
    pub fiber_slope_min: f64,
    pub blowup_targets: usize,
    pub blowup_rates: usize,
    pub blowup_radius: f64,
    pub blowup_tol: f64,
}

impl Default for DashboardConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            scales: (1..=6).map(f64::from).collect(),
            points_per_scale: 40,
            quadruples: 10_000,
            alpha_slope_max: 0.1,
            flat_t: vec![1.0, 2.0, 4.0, 8.0],
            fiber_scales: vec![4.0, 8.0, 16.0, 32.0],
            fiber_slope_min: 0.1,
            blowup_targets: 3,
            blowup_rates: 8,
            blowup_radius: 2.0,
            blowup_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupCheck {
    pub target: Vec<f64>,
    pub consecutive: Vec<f64>,
    pub witness_length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DashboardReport {
    pub dim: usize,
    pub basepoint: Vec<f64>,
    pub hilbert_profile: ScalingProfile,
    /// (a) Hilbert four-point alpha stays bounded across scales.
    pub hilbert_alpha_bounded: bool,
    pub flat: FlatProfile,
    pub fiber_alpha: Vec<FiberAlpha>,
    pub fiber_slope: f64,
    /// (b) imaginary fibers embed with a positive band and linearly growing alpha.
    pub tube_flat_witness: bool,
    pub blowups: Vec<BlowupCheck>,
    /// (c) no boundary segment in any tested blow-up limit.
    pub no_segment_in_limits: bool,
    /// (a) and (c) together.
    pub hypotheses_indicated: bool,
    pub summary: Vec<String>,
}

/// Numerical indicators for the hypotheses on a bounded base. Reports what the
/// numbers show and nothing about biholomorphic classification.
pub fn hypothesis_dashboard(base: &ConvexBody, cfg: &DashboardConfig) -> Result<DashboardReport> {
    if !base.is_bounded() {
        return Err(Error::UnboundedBase);
    }
    let tube = TubeDomain::new(base.clone())?;
    let d = base.dim();
    let p = match base.interior_point() {
        Some(p) if base.inside(&p) => p,
        _ => find_interior_point(base, 1e6)?,
    };

    let view = HilbertSpaceView::new(base.clone())?;
    let space = HilbertProfile {
        view,
        basepoint: p.clone(),
    };
    let profile = delta_scaling_profile(
        &space,
        &cfg.scales,
        &ProfileOptions {
            points_per_scale: cfg.points_per_scale,
            budget: Budget::Sampled(cfg.quadruples),
            seed: cfg.seed,
        },
    )?;
    let bounded = profile.slope <= cfg.alpha_slope_max;

    let kb = KobayashiBudget {
        seed: cfg.seed,
        ..KobayashiBudget::default()
    };
    let mut e1 = DVector::zeros(d);
    e1[0] = 1.0;
    let flat = flat_embedding_profile(&tube, &p, &e1, &cfg.flat_t, &kb)?;
    let fiber_alpha = if d >= 2 {
        cfg.fiber_scales
            .iter()
            .map(|&s| fiber_grid_alpha(&tube, &p, s, &kb))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let fiber_slope = least_squares_slope(
        &fiber_alpha.iter().map(|f| f.scale).collect::<Vec<_>>(),
        &fiber_alpha.iter().map(|f| f.alpha_lo).collect::<Vec<_>>(),
    );
    let grows = fiber_alpha.len() >= 2 && fiber_slope >= cfg.fiber_slope_min;
    let flat_witness = flat.band.is_some() && grows;

    let rates: Vec<f64> = (1..=cfg.blowup_rates).map(|k| 4f64.powi(k as i32)).collect();
    let mut rng = seeded_rng(cfg.seed);
    let mut blowups = Vec::with_capacity(cfg.blowup_targets);
    for k in 0..cfg.blowup_targets {
        let u = if d == 2 {
            let a = 2.0 * PI * k as f64 / cfg.blowup_targets as f64;
            DVector::from_vec(vec![a.cos(), a.sin()])
        } else {
            random_unit(&mut rng, d)
        };
        let t = base.ray_exit(&p, &u)?;
        let target = &p + &u * t;
        let mut spec = BlowupSpec::new(base.clone(), target.clone(), rates.clone(), Normalization::John);
        spec.seed = cfg.seed.wrapping_add(k as u64);
        let seq: Vec<PointedBody> = blowup_sequence(&spec)?.into_iter().map(|t| t.pointed).collect();
        let net = NetOptions {
            seed: cfg.seed,
            ..NetOptions::default()
        };
        let orbit = orbit_limit(&seq, cfg.blowup_radius, cfg.blowup_tol, &net)?;
        let verdict = limit_strictness_verdict(&orbit.limit, cfg.blowup_tol)?;
        blowups.push(BlowupCheck {
            target: target.iter().copied().collect(),
            consecutive: orbit.consecutive,
            witness_length: verdict.witness.map(|w| w.length()),
        });
    }
    let strict = blowups.iter().all(|b| b.witness_length.is_none());

    let mut summary = vec![format!(
        "(a) Hilbert four-point alpha slope {:.4} (threshold {}): {}",
        profile.slope,
        cfg.alpha_slope_max,
        if bounded { "bounded, consistent with a hyperbolic base geometry" } else { "growing, hypothesis not indicated" }
    )];
    summary.push(match (&flat.band, fiber_alpha.last()) {
        (Some((lo, hi)), Some(f)) => format!(
            "(b) fiber ratios in [{lo:.6}, {hi:.6}], fiber alpha {:.4} at side {}, slope {fiber_slope:.4}: {}",
            f.alpha_lo,
            f.scale,
            if flat_witness { "flat witness found" } else { "no flat witness" }
        ),
        _ => "(b) no flat witness".to_string(),
    });
    summary.push(format!(
        "(c) {} of {} blow-up limits show a boundary segment",
        blowups.iter().filter(|b| b.witness_length.is_some()).count(),
        blowups.len()
    ));
    summary.push(if bounded && strict {
        "hypotheses indicated numerically; no classification is claimed".into()
    } else {
        "hypotheses not met by these indicators".into()
    });

    Ok(DashboardReport {
        dim: d,
        basepoint: p.iter().copied().collect(),
        hilbert_profile: profile,
        hilbert_alpha_bounded: bounded,
        flat,
        fiber_alpha,
        fiber_slope,
        tube_flat_witness: flat_witness,
        blowups,
        no_segment_in_limits: strict,
        hypotheses_indicated: bounded && strict,
        summary,
    })
}
