use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mifkit_core::escape::random_word;
use mifkit_core::groups::{family, free_pair};
use mifkit_core::heights::{find_escape_prime, HeightConstants};
use mifkit_core::modp::count_zeros;
use mifkit_core::ring::RingCtx;
use mifkit_core::rng::substream;
use mifkit_core::selftest::random_poly;

fn poly_mul(c: &mut Criterion) {
    let ctx = RingCtx::with_vars(2, 2).unwrap();
    let mut rng = substream(1, 0);
    let a = random_poly(&ctx, 8, 6, 12, &mut rng);
    let b = random_poly(&ctx, 8, 6, 12, &mut rng);
    c.bench_function("poly/mul", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    let consts = HeightConstants::for_ctx(&ctx);
    c.bench_function("poly/escape_prime", |bench| bench.iter(|| find_escape_prime(black_box(&a), 64, &consts)));
    c.bench_function("poly/count_zeros_p31", |bench| bench.iter(|| count_zeros(black_box(&a), 31)));
}

fn word_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("word/evaluate");
    for (name, spec) in [("free_pair", free_pair()), ("family", family())] {
        let mut rng = substream(2, 0);
        let w = random_word(&spec, 16, &mut rng).unwrap();
        let gamma = mifkit_core::escape::random_element(&spec, 12, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(name), &(w, gamma), |bench, (w, g)| {
            bench.iter(|| w.evaluate(g).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, poly_mul, word_eval);
criterion_main!(benches);
