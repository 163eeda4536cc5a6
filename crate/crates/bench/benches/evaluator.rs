use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lprime_core::evaluator::hurwitz_zeta;
use lprime_core::zerofinder::count_zeros_rect;
use lprime_core::{character, g1_value, l_jet, Complex64, EvalConfig, FunctionTag, Rectangle, ScanConfig, Scanner, Target};

fn evaluation(c: &mut Criterion) {
    let cfg = EvalConfig::default();
    let chi = character(5, 1).unwrap();
    let mut group = c.benchmark_group("l_jet");
    for t in [10.0, 50.0, 200.0] {
        let s = Complex64::new(0.5, t);
        group.bench_with_input(BenchmarkId::from_parameter(t), &s, |b, &s| {
            b.iter(|| l_jet(&chi, black_box(s), 2, &cfg).unwrap())
        });
    }
    group.finish();

    c.bench_function("hurwitz_zeta/0.5+30i", |b| {
        b.iter(|| hurwitz_zeta(black_box(Complex64::new(0.5, 30.0)), 0.2, 0, &cfg).unwrap())
    });
    c.bench_function("g1_value/8+5i", |b| {
        b.iter(|| g1_value(&chi, black_box(Complex64::new(8.0, 5.0)), &cfg).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let cfg = ScanConfig::default();
    let chi = character(3, 1).unwrap();
    let rect = Rectangle::new(0.1, 4.0, 10.0, 20.0).unwrap();
    c.bench_function("winding/lprime_box", |b| {
        b.iter(|| count_zeros_rect(Target::LPrime, &chi, black_box(&rect), &cfg.eval).unwrap())
    });

    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("lprime_q3_T20", |b| {
        b.iter(|| Scanner::new(&chi, FunctionTag::Lprime, &cfg).unwrap().scan(black_box(20.0)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, evaluation, counting);
criterion_main!(benches);
