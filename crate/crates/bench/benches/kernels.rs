use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tubekit::convex::spec::builtin;
use tubekit::kobayashi::{kobayashi_interval, KobayashiBudget};
use tubekit::{cube_tube_exact, four_point_alpha, Budget, ComplexConvexDomain, HilbertSpaceView, MetricSample};
use tubekit_bench::{spiral, tube_pairs};

fn hilbert(c: &mut Criterion) {
    for name in ["disk", "square", "ellipse"] {
        let view = HilbertSpaceView::new(builtin(name, None).unwrap()).unwrap();
        let pts = spiral(64, 0.9);
        c.bench_function(&format!("hilbert_distance/{name}"), |b| {
            b.iter(|| {
                let mut s = 0.0;
                for w in pts.windows(2) {
                    s += view.distance(&w[0], &w[1]).unwrap();
                }
                black_box(s)
            })
        });
    }
}

fn four_point(c: &mut Criterion) {
    let view = HilbertSpaceView::new(builtin("disk", None).unwrap()).unwrap();
    let pts = spiral(24, 0.95);
    let sample = MetricSample::from_fn(&pts, |a, b| view.distance(a, b)).unwrap();
    c.bench_function("four_point_alpha/exhaustive_24", |b| {
        b.iter(|| black_box(four_point_alpha(&sample, Budget::Exhaustive, 0).unwrap().alpha))
    });
    c.bench_function("four_point_alpha/sampled_10k", |b| {
        b.iter(|| black_box(four_point_alpha(&sample, Budget::Sampled(10_000), 7).unwrap().alpha))
    });
}

fn kobayashi(c: &mut Criterion) {
    let tube = ComplexConvexDomain::tube(builtin("square", None).unwrap()).unwrap();
    let pairs = tube_pairs(8);
    let budget = KobayashiBudget::default();
    c.bench_function("kobayashi_interval/square_tube", |b| {
        b.iter(|| {
            for (z, w) in &pairs {
                black_box(kobayashi_interval(&tube, z, w, &budget).unwrap());
            }
        })
    });
    c.bench_function("cube_tube_exact", |b| {
        b.iter(|| {
            for (z, w) in &pairs {
                black_box(cube_tube_exact(z, w).unwrap());
            }
        })
    });
}

criterion_group!(benches, hilbert, four_point, kobayashi);
criterion_main!(benches);
