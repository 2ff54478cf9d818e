use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gof_core::bounds::{self, Tolerances};
use gof_core::construct;
use gof_core::presets;
use gof_core::sampling::Sampler;
use gof_core::scenario::Scenario;
use gof_core::{FiniteAbelianGroup, SignalSpace};

fn pertexa() -> Scenario {
    Scenario::from_value(&presets::scenario("pertexa").unwrap(), None).unwrap()
}

fn frame_operator(c: &mut Criterion) {
    let sc = pertexa();
    let sys = sc.system("phi").unwrap();
    c.bench_function("frame_operator/Z16_n2", |b| b.iter(|| black_box(sys.family()).frame_operator()));
}

fn theta_bounds(c: &mut Criterion) {
    let sc = pertexa();
    let s = sc.system("phi").unwrap().frame_operator().to_dense();
    let t = sc.operator("theta").unwrap().to_dense();
    c.bench_function("pencil_bounds/pertexa", |b| b.iter(|| bounds::pencil_bounds(black_box(&s), black_box(&t), Tolerances::default())));
}

fn omega(c: &mut Criterion) {
    let sc = pertexa();
    let sys = sc.system("phi").unwrap();
    let theta = sc.operator("theta").unwrap();
    c.bench_function("omega/pertexa", |b| b.iter(|| construct::omega_characterization(sys.family(), theta, Tolerances::default()).unwrap()));
}

fn fourier(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier");
    for order in [16usize, 32, 64] {
        let space = SignalSpace::torus_like(FiniteAbelianGroup::cyclic(order).unwrap(), 2).unwrap();
        let f = Sampler::new(1).signal(&space);
        group.bench_with_input(BenchmarkId::from_parameter(order), &f, |b, f| b.iter(|| f.fourier().unwrap()));
    }
    group.finish();
}

criterion_group!(benches, frame_operator, theta_bounds, omega, fourier);
criterion_main!(benches);
