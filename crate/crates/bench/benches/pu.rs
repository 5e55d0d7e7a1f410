use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pu_bench::{damped_oscillator, opposite_mass_pair, window};
use pu_core::contour::biortho_inner;
use pu_core::fock::{build_hamiltonians, t_ordered_two_point, PAIR_CUTOFF};
use pu_core::kernel::{compose_slices, spectral_kernel, two_point_from_w, KernelRequest};
use pu_core::quadrature::GaussHermite;
use pu_core::transform::{integrate_classical, pu_lagrangian, ClassicalState};

fn lagrangian(c: &mut Criterion) {
    let p = opposite_mass_pair();
    c.bench_function("pu_lagrangian", |b| b.iter(|| pu_lagrangian(black_box(&p)).unwrap()));
    let init = ClassicalState::real([1.0, 0.3, -0.5, 0.2]);
    c.bench_function("integrate_classical t=10 dt=1e-3", |b| {
        b.iter(|| integrate_classical(black_box(&p), &init, 10.0, 1e-3).unwrap())
    });
}

fn quantum(c: &mut Criterion) {
    c.bench_function("gauss_hermite 64", |b| b.iter(|| GaussHermite::new(black_box(64))));
    let osc = damped_oscillator();
    c.bench_function("biortho_inner 5,5", |b| b.iter(|| biortho_inner(black_box(&osc), 5, 5, 64).unwrap()));
    let pair = opposite_mass_pair();
    c.bench_function("build_hamiltonians", |b| b.iter(|| build_hamiltonians(black_box(&pair), PAIR_CUTOFF).unwrap()));
    c.bench_function("t_ordered_two_point", |b| b.iter(|| t_ordered_two_point(black_box(&osc), 1.3, 0.2).unwrap()));
}

fn kernels(c: &mut Criterion) {
    let osc = damped_oscillator();
    let req = KernelRequest::new(osc, 0.7);
    let grid = window(3.0, 13);
    c.bench_function("spectral_kernel 13x13", |b| {
        b.iter(|| {
            for &s in &grid {
                for &t in &grid {
                    black_box(spectral_kernel(&req, s, t).unwrap());
                }
            }
        })
    });
    let sliced = KernelRequest { slices: 64, ..req };
    c.bench_function("compose_slices 64", |b| b.iter(|| compose_slices(black_box(&sliced)).unwrap()));
    c.bench_function("two_point_from_w", |b| b.iter(|| two_point_from_w(black_box(&osc), 2.0, 0.5).unwrap()));
}

criterion_group!(benches, lagrangian, quantum, kernels);
criterion_main!(benches);
