use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::{DMatrix, DVector};
use stlppc_bench::{dispersion_body, reach_scenario};
use stlppc_core::{
    control_input, integrate_step, run, FunnelParams, PerformanceFunction, SmoothConfig,
    SystemModel,
};

fn bench_integrate_step(c: &mut Criterion) {
    let laplacian =
        DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
    let system = SystemModel::consensus(&laplacian, 2).unwrap();
    let x = DVector::from_vec(vec![1.1, 3.1, 2.0, 0.5, 7.0, 1.5]);
    let u = DVector::from_element(6, 0.1);
    let w = DVector::zeros(6);
    c.bench_function("integrate_step/consensus_3x2", |b| {
        b.iter(|| integrate_step(&system, black_box(&x), &u, &w, 0.0, 0.01).unwrap())
    });
}

fn bench_control_input(c: &mut Criterion) {
    let (body, x) = dispersion_body();
    let laplacian =
        DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
    let system = SystemModel::consensus(&laplacian, 2).unwrap();
    let params = FunnelParams {
        t_star: 15.0,
        r: 0.0,
        rho_max: 0.2,
        perf: PerformanceFunction::new(3.0, 0.02, 0.4),
    };
    let cfg = SmoothConfig { k: 20.0 };
    c.bench_function("control_input/formation_body", |b| {
        b.iter(|| {
            control_input(black_box(&body), black_box(&x), 1.0, &params, &system, &cfg).unwrap()
        })
    });
}

fn bench_full_run(c: &mut Criterion) {
    let scenario = reach_scenario();
    c.bench_function("run/reach_scenario_500_steps", |b| {
        b.iter(|| run(black_box(&scenario)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_integrate_step,
    bench_control_input,
    bench_full_run
);
criterion_main!(benches);
