use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ebound_bench::{reference, triangle};
use elastic_bounds::pea_design::{actuator_load, polynomial_family};
use elastic_bounds::power::power_metrics;
use elastic_bounds::verify::sweep_frequency_sea;
use elastic_bounds::{build_pea_loop, build_sea_loop, metrics_pea_loop, metrics_time, ElasticProfile, Penalty};
use std::hint::black_box;

fn loops(c: &mut Criterion) {
    let mut g = c.benchmark_group("loop_build");
    for n in [512, 2048] {
        let (_, w, load) = reference(n);
        g.bench_with_input(BenchmarkId::new("pea_harmonic", n), &n, |b, _| b.iter(|| build_pea_loop(black_box(&load), &w).unwrap()));
        g.bench_with_input(BenchmarkId::new("sea_harmonic", n), &n, |b, _| b.iter(|| build_sea_loop(black_box(&load), &w).unwrap()));
    }
    let (_, w, load) = triangle(2048);
    g.bench_function("pea_triangle/2048", |b| b.iter(|| build_pea_loop(black_box(&load), &w).unwrap()));
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let (_, w, load) = reference(2048);
    let l = build_pea_loop(&load, &w).unwrap();
    let cubic = polynomial_family(&l, 1.0, 3, 1.0).unwrap();
    let f = actuator_load(&cubic, &load, &w).unwrap();
    let v = w.velocity();
    let q = Penalty::Constant(1.33);
    let mut g = c.benchmark_group("metrics");
    g.bench_function("time_core", |b| b.iter(|| power_metrics(black_box(&f), &v, &q).unwrap()));
    g.bench_function("time_full", |b| b.iter(|| metrics_time(black_box(&f), &v, &q).unwrap()));
    g.bench_function("loop", |b| b.iter(|| metrics_pea_loop(&l, black_box(&cubic), &q, &q).unwrap()));
    let lin = ElasticProfile::linear(1.0, (l.x1, l.x2));
    g.bench_function("loop_linear", |b| b.iter(|| metrics_pea_loop(&l, black_box(&lin), &q, &q).unwrap()));
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("sea_zeta_0.1", |b| b.iter(|| sweep_frequency_sea(1.0, 0.2, 1.0, (0.3, 1.2), 37, 1.0).unwrap()));
    g.finish();
}

criterion_group!(benches, loops, metrics, sweep);
criterion_main!(benches);
