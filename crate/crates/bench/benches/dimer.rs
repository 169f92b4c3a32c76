use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use smm_gate_core::dynamics::{basis_vector, calibrate_pi_pulse, extract_gate, propagate};
use smm_gate_core::linalg::eigendecompose;
use smm_gate_core::model::{h_full, omega1};
use smm_gate_core::perturbation::{rate_table, GAUSS};
use smm_gate_core::{ComputingBasis, Frame, ModelParams, PropagationOptions, PulseParams};

fn spectrum(c: &mut Criterion) {
    let h = h_full(&ModelParams::default()).unwrap();
    c.bench_function("eigendecompose_h_full", |b| {
        b.iter(|| eigendecompose(black_box(&h)).unwrap())
    });
}

fn rates(c: &mut Criterion) {
    let p = ModelParams::default();
    let pulse = PulseParams::new(3.8 * GAUSS, omega1(&p), 1e-8).unwrap();
    c.bench_function("rate_table", |b| {
        b.iter(|| rate_table(black_box(&p), &pulse).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let p = ModelParams::default().with_jxy(0.0);
    let cb = ComputingBasis::new(p.spin);
    let pulse = PulseParams::new(calibrate_pi_pulse(&p, 1e-8).unwrap(), omega1(&p), 1e-8).unwrap();
    c.bench_function("gate_rotating", |b| {
        b.iter(|| extract_gate(black_box(&p), &pulse).unwrap())
    });

    let short = PulseParams::new(20.0 * GAUSS, omega1(&p), 2e-10).unwrap();
    let psi = basis_vector(&p, &cb.c);
    let mut group = c.benchmark_group("propagate_short_pulse");
    group.sample_size(10);
    for frame in [Frame::Rotating, Frame::Lab] {
        group.bench_function(format!("{frame:?}").to_lowercase(), |b| {
            b.iter(|| {
                let opts = PropagationOptions::default().frame(frame);
                propagate(&p, &short, black_box(&psi), opts).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum, rates, dynamics);
criterion_main!(benches);
