//! Parallel vs sequential throughput on the data-parallel inner loops: the
//! K-functional batch that drives the Peetre norm, and bulk rearrangement.
//!
//! With `--no-default-features` both arms coincide (everything sequential).

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use peetre_core::{
    k_functional_batch, k_functional_batch_seq, KSettings, SpaceSpec, StepFunction, WeightScheme,
};

fn weight_pairs(n: usize) -> Vec<(f64, f64)> {
    let w = WeightScheme::geometric(1.0, 2.0, 1.0, 0.5).unwrap();
    (1..=n).map(|i| (w.a(i), w.b(i))).collect()
}

fn bench_k_batch(c: &mut Criterion) {
    let f = StepFunction::random(11, 48, 2.0).unwrap();
    let pairs = weight_pairs(24);
    let e = SpaceSpec::l2();
    let fs = SpaceSpec::l_infinity();
    let settings = KSettings::default();

    let mut group = c.benchmark_group("k_batch_24_general");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| {
            k_functional_batch_seq(black_box(&f), &pairs, &e, &fs, &settings).unwrap()
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| k_functional_batch(black_box(&f), &pairs, &e, &fs, &settings).unwrap())
    });
    group.finish();

    // the (L1, Linf) fast path: lighter per item, parallel overhead visible
    let e1 = SpaceSpec::l1();
    let mut group = c.benchmark_group("k_batch_24_l1_linf");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| {
            k_functional_batch_seq(black_box(&f), &pairs, &e1, &fs, &settings).unwrap()
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| k_functional_batch(black_box(&f), &pairs, &e1, &fs, &settings).unwrap())
    });
    group.finish();
}

fn bench_rearrange_bulk(c: &mut Criterion) {
    let inputs: Vec<StepFunction> = (0..256)
        .map(|s| StepFunction::random(s, 64, 2.0).unwrap())
        .collect();

    let mut group = c.benchmark_group("rearrange_256x64");
    group.sample_size(20);
    group.bench_function("seq", |b| {
        b.iter(|| {
            peetre_core::exec::map_collect_seq(black_box(&inputs), |f| f.rearrange())
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| peetre_core::exec::map_collect(black_box(&inputs), |f| f.rearrange()))
    });
    group.finish();
}

criterion_group!(benches, bench_k_batch, bench_rearrange_bulk);
criterion_main!(benches);
