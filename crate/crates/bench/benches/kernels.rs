use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fkg_core::functional::{verify_chain, Instance};
use fkg_core::measure::random_log_supermodular;
use fkg_core::sample::{random_fn_series, random_generators, trial_rng};
use fkg_core::series::{lhs_series, rhs_series};
use fkg_core::{CouplingBounds, GroundSet, Measure, Mode};

fn measure(m: usize) -> Arc<Measure> {
    let g = GroundSet::new(m).unwrap();
    Arc::new(random_log_supermodular(7, g, &CouplingBounds::default()).unwrap())
}

fn instance(m: usize, n: usize) -> Instance {
    let mu = measure(m);
    let gens = random_generators(&mut trial_rng(7, n as u64), mu.ground(), n);
    Instance::new(mu, gens).unwrap()
}

fn e_n(c: &mut Criterion) {
    let mut group = c.benchmark_group("e_n");
    for n in [3, 5, 7] {
        let inst = instance(4, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| black_box(inst).e_n())
        });
    }
    group.finish();
}

fn chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_chain");
    for n in [3, 5] {
        let inst = instance(4, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| verify_chain(black_box(inst), Mode::Verify).unwrap())
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let mu = measure(3);
    let p = random_fn_series(&mut trial_rng(7, 0), mu.ground(), 6).unwrap();
    c.bench_function("lhs_series/D6", |b| {
        b.iter(|| lhs_series(black_box(&mu), &p).unwrap())
    });
    c.bench_function("rhs_series/D6", |b| {
        b.iter(|| rhs_series(black_box(&mu), &p).unwrap())
    });
}

fn check_fkg(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_fkg");
    for m in [4, 6, 8] {
        let mu = measure(m);
        group.bench_with_input(BenchmarkId::from_parameter(m), &mu, |b, mu| {
            b.iter(|| black_box(mu).check_fkg())
        });
    }
    group.finish();
}

criterion_group!(benches, e_n, chain, series, check_fkg);
criterion_main!(benches);
