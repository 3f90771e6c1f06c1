use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mifkit_bench::{sl2_graph, sl2_table};
use mifkit_core::cayley::{dense_spectrum, lanczos_spectrum, walk_distribution};
use mifkit_core::freeprod::MixedWord;
use mifkit_core::groups::free_pair;
use mifkit_core::walk::decay_curve;

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    for p in [7u64, 13] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| b.iter(|| sl2_table(p)));
    }
    group.finish();
}

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    let g = sl2_graph(11);
    group.bench_function("dense_p11", |b| b.iter(|| dense_spectrum(&g).unwrap()));
    group.bench_function("lanczos_p11", |b| b.iter(|| lanczos_spectrum(&g).unwrap()));
    let g = sl2_graph(13);
    group.bench_function("lanczos_p13", |b| b.iter(|| lanczos_spectrum(&g).unwrap()));
    group.finish();
}

fn walks(c: &mut Criterion) {
    let g = sl2_graph(7);
    c.bench_function("walk/distribution_p7_k40", |b| b.iter(|| walk_distribution(&g, 0, 40).unwrap()));
    let spec = free_pair();
    let w = MixedWord::parse("x A x^-1 A^-1", &spec).unwrap();
    let mut group = c.benchmark_group("walk/decay");
    group.sample_size(10);
    group.bench_function("k1_12_1000_trials", |b| {
        b.iter(|| decay_curve(&spec, &w, &(1..=12).collect::<Vec<_>>(), 1000, 42, 0.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, closure, spectra, walks);
criterion_main!(benches);
