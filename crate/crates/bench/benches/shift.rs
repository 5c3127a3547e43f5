use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bwshift::presets::load_preset;
use bwshift::{
    analyze, apply, apply_iterated, assemble_matrix, decompose, AnalysisParams, BasisTag,
    BilateralVector, WeightedShift,
};

fn shift(name: &str) -> WeightedShift {
    WeightedShift::new(load_preset(name).unwrap().shift).unwrap()
}

fn bench_apply(c: &mut Criterion) {
    let op = shift("zero_one_failure");
    let w = op.window();
    let u = BilateralVector::from_entries(
        w,
        (1..=5).map(|k| (1i64 << k, 2f64.powi(-(1 << k)))),
        BasisTag::Schauder,
    )
    .unwrap();
    c.bench_function("apply closed form nu=16", |b| {
        b.iter(|| apply(&op, black_box(16), &u).unwrap())
    });
    c.bench_function("apply iterated nu=16", |b| {
        b.iter(|| apply_iterated(&op, black_box(16), &u).unwrap())
    });
}

fn bench_assembly(c: &mut Criterion) {
    let op = shift("example_chaotic");
    c.bench_function("assemble nu=1", |b| {
        b.iter(|| assemble_matrix(&op, black_box(1)).unwrap())
    });
    c.bench_function("assemble nu=8", |b| {
        b.iter(|| assemble_matrix(&op, black_box(8)).unwrap())
    });
    c.bench_function("decompose i_max=60", |b| {
        b.iter(|| decompose(&op, black_box(60)).unwrap())
    });
}

fn bench_analyze(c: &mut Criterion) {
    let op = shift("bergman");
    let params = AnalysisParams::default();
    c.bench_function("analyze bergman", |b| {
        b.iter(|| analyze(&op, black_box(&params)).unwrap())
    });
}

criterion_group!(benches, bench_apply, bench_assembly, bench_analyze);
criterion_main!(benches);
