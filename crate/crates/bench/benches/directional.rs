use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gradcompass::directional::{kappa_hat_from_rbar, log_bessel_i, sample_uniform_sphere, simulate_uniform_kappa_hat};
use gradcompass::RngStream;
use std::hint::black_box;

fn uniform_kappa(c: &mut Criterion) {
    let mut g = c.benchmark_group("uniform_kappa_hat");
    g.sample_size(10);
    for d in [10_000usize, 100_000] {
        g.bench_with_input(BenchmarkId::new("n=100", d), &d, |b, &d| {
            b.iter(|| simulate_uniform_kappa_hat(d, 100, RngStream::new(1, 0)).unwrap())
        });
    }
    g.finish();
}

fn sphere_and_estimator(c: &mut Criterion) {
    c.bench_function("sample_uniform_sphere d=635200", |b| {
        b.iter(|| sample_uniform_sphere(635_200, RngStream::new(2, 0)).unwrap())
    });
    c.bench_function("kappa_hat_from_rbar", |b| b.iter(|| kappa_hat_from_rbar(black_box(0.37), 635_200).unwrap()));
    c.bench_function("log_bessel_i series", |b| b.iter(|| log_bessel_i(black_box(49.0), black_box(120.0))));
    c.bench_function("log_bessel_i debye", |b| b.iter(|| log_bessel_i(black_box(317_599.0), black_box(5e4))));
}

criterion_group!(benches, uniform_kappa, sphere_and_estimator);
criterion_main!(benches);
