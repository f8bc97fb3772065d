use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use radshock_bench::{desk_constants, desk_left, desk_run, desk_shock, desk_system, kernel_input, DESK_A};
use radshock_core::baby::BabySystem;
use radshock_core::gas::shock_from_amplitude;
use radshock_core::manifold::integrate_manifold;
use radshock_core::pipeline::{run_baby, run_gas, PipelineOptions};
use radshock_core::reduced::{build_reduced, equilibria};
use radshock_core::verify::kernel_flux;
use radshock_core::{ManifoldOptions, Method, Side};

fn jump(c: &mut Criterion) {
    let (left, consts) = (desk_left(), desk_constants());
    c.bench_function("shock_from_amplitude", |b| {
        b.iter(|| shock_from_amplitude(&left, &consts, black_box(DESK_A)).unwrap())
    });
    let shock = desk_shock();
    c.bench_function("build_reduced", |b| b.iter(|| build_reduced(black_box(&shock)).unwrap()));
}

fn manifold(c: &mut Criterion) {
    let sys = desk_system();
    let eq = equilibria(&sys).unwrap();
    let mut group = c.benchmark_group("integrate_manifold");
    group.sample_size(20);
    for method in [Method::Explicit, Method::Stiff] {
        let opts = ManifoldOptions {
            method,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{method:?}")), &opts, |b, o| {
            b.iter(|| integrate_manifold(&sys, &eq, Side::Flat, o).unwrap())
        });
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let (xi, g) = kernel_input(&desk_run());
    let mut group = c.benchmark_group("kernel_flux");
    group.sample_size(20);
    group.bench_function(BenchmarkId::from_parameter(xi.len()), |b| {
        b.iter(|| kernel_flux(black_box(&xi), black_box(&g)).unwrap())
    });
    group.finish();
}

fn pipelines(c: &mut Criterion) {
    let opts = PipelineOptions::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("gas_desk", |b| {
        b.iter(|| run_gas(&desk_left(), &desk_constants(), DESK_A, &opts).unwrap())
    });
    let baby = BabySystem::centred(0.5).unwrap();
    group.bench_function("baby", |b| b.iter(|| run_baby(&baby, &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, jump, manifold, kernel, pipelines);
criterion_main!(benches);
