//! Oracle enumeration, sequential against data-parallel, plus the solver.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use knowbase::demo::{build_demo, TASKS};
use knowbase::par::ExecMode;
use knowbase::semantics::{oracle_solutions, OracleConfig};
use knowbase::solver::{solve, SolveConfig, TaskSpec};

fn oracle_modes(c: &mut Criterion) {
    let model = build_demo().unwrap().model().as_ref().clone();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for task in TASKS {
        let spec = TaskSpec::named(&model, task).unwrap();
        for (label, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            let config = OracleConfig { budget: u128::MAX, mode, ..OracleConfig::default() };
            group.bench_with_input(BenchmarkId::new(label, task), &spec, |b, spec| {
                b.iter(|| oracle_solutions(black_box(&model), spec, &config).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("solver", task), &spec, |b, spec| {
            b.iter(|| solve(black_box(&model), spec, &SolveConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_modes);
criterion_main!(benches);
