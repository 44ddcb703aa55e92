//! Acceptance suite: one line per criterion, tolerances pinned below.
//! Runs without the libtest harness so every line is printed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{dvector, DVector};
use rand::Rng;
use tubekit::convex::spec::builtin;
use tubekit::hyperbolicity::{delta_scaling_profile, Budget, HilbertProfile, ProfileOptions};
use tubekit::kobayashi::{
    kobayashi_interval, model_distance, slice_chain_upper_bound, ComplexConvexDomain, KobayashiBudget,
    ModelDomain,
};
use tubekit::net::{seeded_rng, DirectionNet, NetOptions};
use tubekit::rescaling::{
    blowup_sequence, limit_strictness_verdict, orbit_limit, BlowupSpec, LimitSamples, Normalization,
};
use tubekit::tube::{asym_embedding_experiment, cube_tube_exact, fiber_grid_alpha, flat_embedding_profile};
use tubekit::tube::{EmbeddingExperiment, TubeDomain};
use tubekit::{Complex64, HilbertSpaceView, Point};

const SEED: u64 = 7;

const C1_TOL: f64 = 1e-9;
const C1_TIME: Duration = Duration::from_secs(1);
const C2_TOL: f64 = 1e-8;
const C3_ELLIPSE_MAX: f64 = 0.02;
const C3_SQUARE_MIN: f64 = 0.1;
const C3_TIME: Duration = Duration::from_secs(120);
const C3_POINTS: usize = 40;
const C3_QUADRUPLES: usize = 10_000;
const C4_SQUARE_MIN_LEN: f64 = 0.5;
const C4_SQUARE_TOL: f64 = 1e-6;
const C4_ELLIPSE_TOL: f64 = 1e-3;
const C5_TOL: f64 = 1e-12;
const C6_TOL: f64 = 1e-6;
const C7_TOL: f64 = 1e-12;
const C8_TIME: Duration = Duration::from_secs(30);
const C8_FIXTURE_TOL: f64 = 1e-9;
const C9_GROWTH: f64 = 0.2;
const C10_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fixtures() -> serde_json::Value {
    let raw = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fixtures.json"))
        .expect("fixtures.json");
    serde_json::from_str(&raw).expect("fixture json")
}

// Klein-model oracle: chord endpoints from the quadratic, then the cross ratio.
fn klein_distance(x: &Point, y: &Point) -> f64 {
    let v = y - x;
    let a = v.dot(&v);
    let b = 2.0 * x.dot(&v);
    let cc = x.dot(x) - 1.0;
    let disc = (b * b - 4.0 * a * cc).sqrt();
    let t_lo = (-b - disc) / (2.0 * a);
    let t_hi = (-b + disc) / (2.0 * a);
    let p = x + &v * t_lo;
    let q = x + &v * t_hi;
    0.5 * (((x - &q).norm() * (y - &p).norm()) / ((y - &q).norm() * (x - &p).norm())).ln()
}

fn disk_pairs(n: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = seeded_rng(seed);
    let pt = |rng: &mut tubekit::net::SeededRng| loop {
        let p = dvector![rng.random_range(-0.99..0.99), rng.random_range(-0.99..0.99)];
        if p.norm() < 0.99 {
            return p;
        }
    };
    (0..n).map(|_| (pt(&mut rng), pt(&mut rng))).collect()
}

fn c1_values() -> (Vec<f64>, f64) {
    let view = HilbertSpaceView::new(builtin("disk", None).unwrap()).unwrap();
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for (x, y) in disk_pairs(1000, SEED) {
        let h = view.distance(&x, &y).unwrap();
        worst = worst.max((h - klein_distance(&x, &y)).abs());
        out.push(h);
    }
    (out, worst)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (_, worst) = c1_values();
    let el = t.elapsed();
    outcome(
        worst <= C1_TOL && el < C1_TIME,
        format!("max |H - klein| = {worst:.2e} (tol {C1_TOL:e}), {:.3}s", el.as_secs_f64()),
    )
}

fn c2_values() -> (Vec<f64>, f64) {
    let mut rng = seeded_rng(SEED + 2);
    let mut worst = 0.0f64;
    let mut out = Vec::new();
    for name in ["disk", "square", "quadrant"] {
        let body = builtin(name, None).unwrap();
        let view = HilbertSpaceView::new(body.clone()).unwrap();
        let draw = |rng: &mut tubekit::net::SeededRng| loop {
            let p = match name {
                "quadrant" => dvector![rng.random_range(0.01..5.0), rng.random_range(0.01..5.0)],
                _ => dvector![rng.random_range(-0.99..0.99), rng.random_range(-0.99..0.99)],
            };
            if body.contains(&p).unwrap() {
                return p;
            }
        };
        for _ in 0..1000 {
            let x = draw(&mut rng);
            let z = draw(&mut rng);
            let s: f64 = rng.random_range(0.0..1.0);
            let p = &x + (&z - &x) * s;
            let lhs = view.distance(&x, &p).unwrap() + view.distance(&p, &z).unwrap();
            let rhs = view.distance(&x, &z).unwrap();
            worst = worst.max((lhs - rhs).abs());
            out.push(lhs - rhs);
        }
    }
    (out, worst)
}

fn criterion_2() -> Outcome {
    let (_, worst) = c2_values();
    outcome(worst <= C2_TOL, format!("max additivity defect {worst:.2e} (tol {C2_TOL:e})"))
}

fn profile_slope(name: &str, budget: Budget, scales: &[f64]) -> (f64, Vec<f64>) {
    let body = builtin(name, None).unwrap();
    let space = HilbertProfile {
        view: HilbertSpaceView::new(body).unwrap(),
        basepoint: DVector::zeros(2),
    };
    let p = delta_scaling_profile(
        &space,
        scales,
        &ProfileOptions {
            points_per_scale: C3_POINTS,
            budget,
            seed: SEED,
        },
    )
    .unwrap();
    let alphas = p.rows.iter().map(|r| r.alpha_lo).collect();
    (p.slope, alphas)
}

const C3_SCALES: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];

fn criterion_3_square() -> Outcome {
    let t = Instant::now();
    let (slope, _) = profile_slope("square", Budget::Sampled(C3_QUADRUPLES), &C3_SCALES);
    let (ex, _) = profile_slope("square", Budget::Exhaustive, &C3_SCALES[..3]);
    let el = t.elapsed();
    outcome(
        slope >= C3_SQUARE_MIN && el < C3_TIME,
        format!(
            "square slope {slope:.4} (need >= {C3_SQUARE_MIN}); exhaustive slope on scales 1..3 {ex:.4}; {:.1}s",
            el.as_secs_f64()
        ),
    )
}

fn criterion_3_ellipse() -> Outcome {
    let t = Instant::now();
    let (slope, _) = profile_slope("ellipse", Budget::Sampled(C3_QUADRUPLES), &C3_SCALES);
    let (ex, _) = profile_slope("ellipse", Budget::Exhaustive, &C3_SCALES[..3]);
    let el = t.elapsed();
    outcome(
        slope <= C3_ELLIPSE_MAX && el < C3_TIME,
        format!(
            "ellipse slope {slope:.4} (need <= {C3_ELLIPSE_MAX}); exhaustive slope on scales 1..3 {ex:.4}; {:.1}s",
            el.as_secs_f64()
        ),
    )
}

fn criterion_4_square() -> Outcome {
    let spec = BlowupSpec::new(
        builtin("square", None).unwrap(),
        dvector![1.0, 1.0],
        (1..=8).map(|k| 4f64.powi(k)).collect(),
        Normalization::John,
    );
    let seq: Vec<_> = blowup_sequence(&spec).unwrap().into_iter().map(|t| t.pointed).collect();
    let lim = orbit_limit(&seq, 2.0, C4_SQUARE_TOL, &NetOptions::default()).unwrap();
    let v = limit_strictness_verdict(&lim.limit, C4_SQUARE_TOL).unwrap();
    let len = v.witness.as_ref().map_or(0.0, |w| w.length());
    outcome(
        len >= C4_SQUARE_MIN_LEN,
        format!("vertex (1,1): witness length {len:.4} (need >= {C4_SQUARE_MIN_LEN}), cauchy {}", lim.cauchy),
    )
}

fn criterion_4_ellipse() -> Outcome {
    let body = builtin("ellipse", None).unwrap();
    let s = 0.5f64.sqrt();
    let targets = [dvector![2.0, 0.0], dvector![0.0, 1.0], dvector![2.0 * s, s]];
    let net = DirectionNet::new(2, &NetOptions::default());
    let mut witnesses = 0;
    let mut checked = 0;
    for target in targets {
        let spec = BlowupSpec::new(
            body.clone(),
            target,
            (1..=8).map(|k| 4f64.powi(k)).collect(),
            Normalization::John,
        );
        for term in blowup_sequence(&spec).unwrap() {
            for radius in [2.0, 3.0] {
                let lim = LimitSamples::of(&term.pointed.body, radius, &net).unwrap();
                if !limit_strictness_verdict(&lim, C4_ELLIPSE_TOL).unwrap().is_strict() {
                    witnesses += 1;
                }
                checked += 1;
            }
        }
    }
    outcome(
        witnesses == 0,
        format!("{witnesses} witnesses over {checked} normalized terms (3 targets, 8 rates, R in {{2,3}}, tol {C4_ELLIPSE_TOL:e})"),
    )
}

fn criterion_5() -> Outcome {
    let a = model_distance(&ModelDomain::UnitDisk, &[c(0.0, 0.0)], &[c(0.5, 0.0)]).unwrap();
    let e2 = 2f64.exp();
    let b = model_distance(&ModelDomain::UpperHalfPlane, &[c(0.0, 1.0)], &[c(0.0, e2)]).unwrap();
    let s = model_distance(&ModelDomain::strip(-1.0, 1.0).unwrap(), &[c(0.0, 0.0)], &[c(0.0, 4.0)]).unwrap();
    let errs = [(a - 0.549306144334054845697).abs(), (b - 1.0).abs(), (s - PI).abs()];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    outcome(
        worst <= C5_TOL,
        format!("disk {a:.12}, half-plane {b:.12}, strip {s:.12}; max error {worst:.1e} (tol {C5_TOL:e})"),
    )
}

fn criterion_6() -> Outcome {
    let tube = TubeDomain::new(builtin("disk", None).unwrap()).unwrap();
    let prof = flat_embedding_profile(
        &tube,
        &DVector::zeros(2),
        &dvector![1.0, 0.0],
        &[1.0, 2.0, 4.0, 8.0],
        &KobayashiBudget::default(),
    )
    .unwrap();
    let mut worst_w = 0.0f64;
    let mut worst_m = 0.0f64;
    for r in &prof.rows {
        worst_w = worst_w.max(r.hi - r.lo);
        worst_m = worst_m.max((0.5 * (r.lo + r.hi) - PI * r.t / 4.0).abs());
    }
    outcome(
        worst_w < C6_TOL && worst_m <= C6_TOL,
        format!("max width {worst_w:.1e}, max |mid - pi T/4| {worst_m:.1e} (tol {C6_TOL:e})"),
    )
}

fn c7_pairs() -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let mut rng = seeded_rng(SEED + 7);
    let pt = |rng: &mut tubekit::net::SeededRng| -> Vec<Complex64> {
        (0..2)
            .map(|_| c(rng.random_range(-0.95..0.95), rng.random_range(-3.0..3.0)))
            .collect()
    };
    (0..100).map(|_| (pt(&mut rng), pt(&mut rng))).collect()
}

fn c7_values() -> (Vec<f64>, usize, usize) {
    let tube = ComplexConvexDomain::tube(builtin("square", None).unwrap()).unwrap();
    let budget = KobayashiBudget {
        seed: SEED,
        ..KobayashiBudget::default()
    };
    let mut violations = 0;
    let mut non_monotone = 0;
    let mut out = Vec::new();
    for (z, w) in c7_pairs() {
        let exact = cube_tube_exact(&z, &w).unwrap();
        let iv = kobayashi_interval(&tube, &z, &w, &budget).unwrap();
        if !iv.contains(exact, C7_TOL * (1.0 + exact)) {
            violations += 1;
        }
        let his: Vec<f64> = [4, 16, 64]
            .iter()
            .map(|k| slice_chain_upper_bound(&tube, &z, &w, *k).unwrap().value)
            .collect();
        if his.windows(2).any(|p| p[1] > p[0]) {
            non_monotone += 1;
        }
        out.extend([iv.lo, iv.hi]);
        out.extend(his);
    }
    (out, violations, non_monotone)
}

fn criterion_7() -> Outcome {
    let (_, violations, non_monotone) = c7_values();
    outcome(
        violations == 0 && non_monotone == 0,
        format!("100 pairs: {violations} containment violations, {non_monotone} non-monotone chains"),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let rows = asym_embedding_experiment(&EmbeddingExperiment::standard()).unwrap();
    let el = t.elapsed();
    let fx = fixtures();
    let expected: Vec<f64> = fx["asym_error"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let monotone = errs.windows(2).all(|p| p[1] <= p[0]);
    let decay = errs[3] < errs[0] / 5.0;
    let fixture_ok = errs.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= C8_FIXTURE_TOL);
    outcome(
        monotone && decay && fixture_ok && el < C8_TIME,
        format!(
            "e_n = {:?}; monotone {monotone}, e_256 < e_4/5 {decay}, matches fixture {fixture_ok}; {:.2}s",
            errs.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>(),
            el.as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let tube = TubeDomain::new(builtin("disk", None).unwrap()).unwrap();
    let budget = KobayashiBudget::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [4.0, 8.0, 16.0, 32.0] {
        let f = fiber_grid_alpha(&tube, &DVector::zeros(2), s, &budget).unwrap();
        pass &= f.alpha_lo >= C9_GROWTH * s;
        parts.push(format!("s={s}: {:.4}", f.alpha_lo));
    }
    outcome(pass, format!("pessimistic alpha {} (need >= {C9_GROWTH}·s)", parts.join(", ")))
}

fn criterion_10() -> Outcome {
    let pd = ComplexConvexDomain::polydisk(2).unwrap();
    let bidisk = ModelDomain::product(vec![ModelDomain::UnitDisk, ModelDomain::UnitDisk]).unwrap();
    let target = 0.5f64.atanh();
    let mut worst = 0.0f64;
    for r in [0.9, 0.99, 0.999] {
        let z = [c(r, 0.0), c(0.0, 0.0)];
        let w = [c(r, 0.0), c(0.5, 0.0)];
        let m = model_distance(&bidisk, &z, &w).unwrap();
        let iv = kobayashi_interval(&pd, &z, &w, &KobayashiBudget::default()).unwrap();
        worst = worst.max((m - target).abs()).max((iv.lo - target).abs()).max((iv.hi - target).abs());
    }
    outcome(worst <= C10_TOL, format!("max deviation from artanh 0.5: {worst:.1e} (tol {C10_TOL:e})"))
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn criterion_11() -> Outcome {
    let mut same = Vec::new();
    same.push(("1", bits(&c1_values().0) == bits(&c1_values().0)));
    same.push(("2", bits(&c2_values().0) == bits(&c2_values().0)));
    for name in ["square", "ellipse"] {
        let a = profile_slope(name, Budget::Sampled(C3_QUADRUPLES), &C3_SCALES);
        let b = profile_slope(name, Budget::Sampled(C3_QUADRUPLES), &C3_SCALES);
        same.push((
            if name == "square" { "3 square" } else { "3 ellipse" },
            a.0.to_bits() == b.0.to_bits() && bits(&a.1) == bits(&b.1),
        ));
    }
    same.push(("7", bits(&c7_values().0) == bits(&c7_values().0)));
    let failed: Vec<&str> = same.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    outcome(
        failed.is_empty(),
        format!(
            "reran sampled criteria {}: {}",
            same.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
            if failed.is_empty() { "bit-identical".to_string() } else { format!("differs in {failed:?}") }
        ),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 hilbert/klein", criterion_1),
        ("2 geodesic additivity", criterion_2),
        ("3 scaling separation, square", criterion_3_square),
        ("3 scaling separation, ellipse", criterion_3_ellipse),
        ("4 blow-up, square vertex", criterion_4_square),
        ("4 blow-up, ellipse", criterion_4_ellipse),
        ("5 model exactness", criterion_5),
        ("6 tube over disk sandwich", criterion_6),
        ("7 interval certification", criterion_7),
        ("8 asymptotic embedding", criterion_8),
        ("9 flat fibers", criterion_9),
        ("10 polydisk", criterion_10),
        ("11 reproducibility", criterion_11),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance line(s) failed");
        std::process::exit(1);
    }
}
