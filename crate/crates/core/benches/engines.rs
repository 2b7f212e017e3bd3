use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use occwalk::classical::{enumerate_paths_with, monte_carlo_with};
use occwalk::engine::occupation;
use occwalk::{Engine, Execution, ModelSpec};

const MODES: [(&str, Execution); 2] =
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("hadamard-n40");
    group.sample_size(10);
    for engine in [Engine::Density, Engine::Transform] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(engine.as_str(), name), &exec, |b, &exec| {
                b.iter(|| occupation(&ModelSpec::Hadamard, 40, engine, exec).unwrap())
            });
        }
    }
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("brute-n14", name), &exec, |b, &exec| {
            b.iter(|| occupation(&ModelSpec::Hadamard, 14, Engine::Brute, exec).unwrap())
        });
    }
    group.finish();
}

fn classical(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("enumerate-n18", name), &exec, |b, &exec| {
            b.iter(|| enumerate_paths_with(18, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("montecarlo-n50-1e5", name), &exec, |b, &exec| {
            b.iter(|| monte_carlo_with(50, 100_000, 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, engines, classical);
criterion_main!(benches);
