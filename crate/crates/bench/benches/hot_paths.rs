use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ionsurgery_core::collection::{simulate_collection, TrialConfig};
use ionsurgery_core::purification::{simulate, PurificationCircuit};
use ionsurgery_core::quantum::{stephenson_pair, NoiseModel};
use ionsurgery_core::resource::{
    binomial_tail_geq, log_space, min_ions, multiplexing_k, sweep_coupling, DeviceParams,
    SurgeryQuery,
};

fn resource(c: &mut Criterion) {
    let dev = DeviceParams::default();
    c.bench_function("multiplexing_k", |b| {
        b.iter(|| multiplexing_k(black_box(0.819), black_box(0.999)))
    });
    c.bench_function("binomial_tail n=1e5", |b| {
        b.iter(|| binomial_tail_geq(black_box(100_000), black_box(0.0021), black_box(136)))
    });
    c.bench_function("min_ions d=9 T=10us", |b| {
        b.iter(|| min_ions(black_box(&SurgeryQuery::cycle_time(9, 1e-5)), &dev))
    });
    let grid = log_space(1e-4, 1.0, 50).unwrap();
    c.bench_function("coupling sweep 3x3x50", |b| {
        b.iter(|| {
            sweep_coupling(
                &[3, 6, 9],
                &[1e-3, 1e-4, 1e-5],
                black_box(&grid),
                &dev,
                true,
            )
        })
    });
}

fn purification(c: &mut Criterion) {
    let fixture = PurificationCircuit::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../circuits/ga_3to1.json"
    ))
    .unwrap();
    let input = stephenson_pair(true);
    let noise = NoiseModel::trapped_ion();
    c.bench_function("simulate 3->1 fixture", |b| {
        b.iter(|| simulate(black_box(&fixture), &input, &noise))
    });
}

fn collection(c: &mut Criterion) {
    let cfg = TrialConfig {
        n_ions: 1000,
        p_entangle: 2.18e-4,
        attempts: 1000,
        trials: 1000,
        seed: 1,
    };
    c.bench_function("collection 1000 ions x 1000 trials", |b| {
        b.iter(|| simulate_collection(black_box(&cfg)))
    });
}

criterion_group!(benches, resource, purification, collection);
criterion_main!(benches);
