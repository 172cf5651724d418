use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use seqscen::benchmarks::toy_max_problem;
use seqscen::solver::solve_lp;
use seqscen::{run_full, solve_scenario, ProbabilisticLevels, ScheduleParams};
use seqscen_bench::{dense_program, toy_samples};

fn scenario_solves(c: &mut Criterion) {
    let toy = toy_max_problem();
    let mut group = c.benchmark_group("toy scenario solve");
    for n in [50, 500, 5000] {
        let samples = toy_samples(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &samples, |b, s| {
            b.iter(|| solve_scenario(&toy, black_box(s)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("dense lp");
    for (n, rows) in [(2, 100), (5, 500), (10, 1000)] {
        let program = dense_program(n, rows);
        group.bench_with_input(
            BenchmarkId::new(format!("n={n}"), rows),
            &program,
            |b, p| b.iter(|| solve_lp(black_box(p))),
        );
    }
    group.finish();
}

fn sequential_run(c: &mut Criterion) {
    let toy = toy_max_problem();
    let levels = ProbabilisticLevels::new(0.1, 0.1).unwrap();
    let params = ScheduleParams::with_defaults(5, 1).unwrap();
    let mut seed = 0u64;
    c.bench_function("run_full toy eps=0.1 delta=0.1 kt=5", |b| {
        b.iter(|| {
            seed += 1;
            run_full(&toy, levels, params, seed)
        })
    });
}

criterion_group!(benches, scenario_solves, sequential_run);
criterion_main!(benches);
