use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use mfscp_bench::{scaling_series, set4_like};
use mfscp_core::baselines::greedy;
use mfscp_core::mf::{MfState, SolverParams};
use mfscp_core::{example_instance, solve, Overrides};

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    let params = SolverParams {
        t0: 0.1,
        ..SolverParams::default()
    };
    for inst in scaling_series() {
        group.throughput(Throughput::Elements(inst.nnz() as u64));
        let mut state = MfState::new(&inst, &params);
        group.bench_with_input(BenchmarkId::from_parameter(inst.nnz()), &inst, |b, inst| {
            b.iter(|| state.sweep(inst, &params))
        });
    }
    group.finish();
}

fn solves(c: &mut Criterion) {
    let example = example_instance();
    c.bench_function("solve/example", |b| {
        b.iter(|| solve(&example, &Overrides::default()).unwrap())
    });
    let inst = set4_like(0);
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    group.bench_function("set4_like", |b| {
        b.iter(|| solve(&inst, &Overrides::default()).unwrap())
    });
    group.finish();
}

fn baselines(c: &mut Criterion) {
    let inst = set4_like(0);
    c.bench_function("greedy/set4_like", |b| b.iter(|| greedy(&inst)));
}

criterion_group!(benches, sweeps, solves, baselines);
criterion_main!(benches);
