use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lochness_core::group::{DEFAULT_REDUCTION_CAP, DEFAULT_WORD_CAP};
use lochness_core::render::curve_points;
use lochness_core::{
    count_ends, enumerate_words, probe_fixed_points, reduce_to_domain, truncation_topology,
    verify_side_pairings, EndBase, FlatPoint, GVariant, SlitSurface, TruncationSpec,
    UpperHalfPoint, DEFAULT_TOL,
};

fn group(c: &mut Criterion) {
    let mut g = c.benchmark_group("group");
    for depth in [3u32, 4] {
        g.bench_with_input(
            BenchmarkId::new("enumerate_words/window1", depth),
            &depth,
            |b, &d| {
                b.iter(|| enumerate_words(1, d, GVariant::Corrected, DEFAULT_WORD_CAP).unwrap())
            },
        );
    }
    g.bench_function("probe_fixed_points/window1/depth4", |b| {
        b.iter(|| probe_fixed_points(1, 4, GVariant::Corrected, DEFAULT_WORD_CAP).unwrap())
    });
    g.bench_function("verify_side_pairings/window10", |b| {
        b.iter(|| verify_side_pairings(black_box(10), GVariant::Corrected, DEFAULT_TOL))
    });

    // points just above the axis take the most steps
    let points: Vec<UpperHalfPoint> = (0..256)
        .map(|i| {
            UpperHalfPoint::new(-50.0 + 100.0 * i as f64 / 256.0, 0.01 + 0.001 * i as f64).unwrap()
        })
        .collect();
    g.bench_function("reduce_to_domain/256_points", |b| {
        b.iter(|| {
            for &z in &points {
                black_box(reduce_to_domain(z, 15, DEFAULT_TOL, DEFAULT_REDUCTION_CAP).unwrap());
            }
        })
    });
    g.finish();
}

fn flat(c: &mut Criterion) {
    let s = SlitSurface::monster(5).unwrap();
    let mut g = c.benchmark_group("flat");
    g.bench_function("trace_geodesic/aimed", |b| {
        b.iter(|| {
            s.trace_geodesic(
                FlatPoint::Regular { x: 2.5, y: 1.0 },
                black_box((1.0, -1.0)),
                50,
                100.0,
            )
            .unwrap()
        })
    });
    g.bench_function("cone_angle/endpoint", |b| {
        b.iter(|| s.cone_angle(&FlatPoint::Regular { x: 11.0, y: 0.0 }, 1e-3))
    });
    g.finish();
}

fn topology(c: &mut Criterion) {
    let mut g = c.benchmark_group("topology");
    g.bench_function("truncation_topology/flat8", |b| {
        b.iter(|| truncation_topology(&TruncationSpec::flat(black_box(8))).unwrap())
    });
    g.bench_function("count_ends/plane8", |b| {
        b.iter(|| count_ends(EndBase::Plane, black_box(8), 3).unwrap())
    });
    g.finish();
}

fn curve(c: &mut Criterion) {
    c.bench_function("curve_points/6000", |b| {
        b.iter(|| curve_points(black_box(6000)).unwrap())
    });
}

criterion_group!(benches, group, flat, topology, curve);
criterion_main!(benches);
