use std::f64::consts::PI;
use std::hint::black_box;

use adlab::oracle::{closed_system_transfer_oracle, monte_carlo_coherence, McSettings, OdeTolerance};
use adlab::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const GAP: f64 = 200.0 * PI;

fn cavity(kappa: f64) -> CavityShot {
    CavityShot { g: 1.0, delta: 10.0, kappa, n_thermal: 1.0 }
}

fn variance(c: &mut Criterion) {
    let mut group = c.benchmark_group("variance");
    for n in [1u32, 4] {
        let path = DrivePath::circular(n, 2.0 * GAP, 1.0).unwrap();
        let noise = NoiseSpec::CavityShot(cavity(1.0));
        let fourier = DrivePath::fourier(path.coefficients().clone(), 2.0 * GAP, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("closed_form", n), &n, |b, &n| {
            b.iter(|| cavity_second_moment_closed_form(black_box(&cavity(1.0)), n, 1.0))
        });
        group.bench_with_input(BenchmarkId::new("quadrature", n), &fourier, |b, p| {
            b.iter(|| phase_variance(black_box(p), &noise, 1.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("filter", n), &fourier, |b, p| {
            b.iter(|| variance_via_filter(&noise, black_box(p.coefficients()), 1.0).unwrap())
        });
    }
    group.finish();
}

fn ode(c: &mut Criterion) {
    let params = ProtocolParams::balanced(GAP, 1.0).unwrap();
    let path = DrivePath::circular(1, 2.0 * GAP, 1.0).unwrap().with_phase(PhaseProfile::QuadraticRate { c: PI });
    let mut group = c.benchmark_group("ode");
    group.sample_size(10);
    group.bench_function("transfer_200pi", |b| {
        b.iter(|| closed_system_transfer_oracle(&params, black_box(&path), OdeTolerance::default()).unwrap())
    });
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let params = ProtocolParams::balanced(GAP, 1.0).unwrap();
    let path = DrivePath::circular(1, 2.0 * GAP, 1.0).unwrap();
    let spec = Lorentzian { sigma: 1.0, gamma: 1.0, nu0: 2.0 * PI, symmetry: Symmetry::Antisymmetric };
    let settings = McSettings { trials: 1000, seed: 1, grid_points: 1025 };
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("coherence_1000", |b| {
        b.iter(|| monte_carlo_coherence(&params, &path, black_box(&spec), settings).unwrap())
    });
    group.finish();
}

criterion_group!(benches, variance, ode, monte_carlo);
criterion_main!(benches);
