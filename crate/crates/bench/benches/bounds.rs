use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use seqscen::bounds::{binomial_tail, build_schedule, smallest_scenario_n, Flavor};
use seqscen::{lambert_w, ProbabilisticLevels, ScheduleParams};

fn tail(c: &mut Criterion) {
    c.bench_function("binomial_tail N=5240 n=153", |b| {
        b.iter(|| binomial_tail(black_box(5240), black_box(153), black_box(0.05)))
    });
}

fn inversion(c: &mut Criterion) {
    let mut group = c.benchmark_group("smallest_scenario_n");
    for &(eps, delta) in &[(0.2, 1e-2), (0.1, 1e-4), (0.05, 1e-6)] {
        let levels = ProbabilisticLevels::new(eps, delta).unwrap();
        group.bench_function(format!("eps={eps} delta={delta} n=153"), |b| {
            b.iter(|| smallest_scenario_n(black_box(levels), 153))
        });
    }
    group.finish();
}

fn schedule(c: &mut Criterion) {
    let levels = ProbabilisticLevels::new(0.05, 1e-6).unwrap();
    let params = ScheduleParams::with_defaults(30, 153).unwrap();
    c.bench_function("build_schedule full kt=30", |b| {
        b.iter(|| build_schedule(black_box(levels), params, Flavor::Full))
    });
}

fn lambert(c: &mut Criterion) {
    c.bench_function("lambert_w(1.4e8)", |b| {
        b.iter(|| lambert_w(black_box(1.38e8)))
    });
}

criterion_group!(benches, tail, inversion, schedule, lambert);
criterion_main!(benches);
