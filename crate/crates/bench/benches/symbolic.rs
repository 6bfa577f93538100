use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcommute_core::counting::{ClosedForm, CountSet};
use qcommute_core::qfunc::{count_poly, series_for};

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series_k");
    g.sample_size(10);
    for &order in &[10usize, 20, 40] {
        g.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &order| {
            b.iter(|| series_for(CountSet::K, 2, order).unwrap())
        });
    }
    g.finish();
}

fn polynomials(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_poly");
    g.sample_size(10);
    for &n in &[4usize, 8] {
        g.bench_with_input(BenchmarkId::new("k_m2", n), &n, |b, &n| b.iter(|| count_poly(CountSet::K, 2, n).unwrap()));
    }
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    let mut g = c.benchmark_group("closed_form_k");
    for &n in &[5usize, 10, 20] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            // fresh memo each iteration
            b.iter(|| ClosedForm::new(5).unwrap().count(CountSet::K, n, 4).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, series, polynomials, closed_form);
criterion_main!(benches);
