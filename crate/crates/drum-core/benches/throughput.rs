//! Throughput benchmarks over the data-parallel kernels. Bench ids carry the
//! execution mode, so comparing the two is two runs of the same suite:
//!
//!   cargo bench -p drum-core                        # parallel (default)
//!   cargo bench -p drum-core --no-default-features  # sequential

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use drum_core::interferometry::synthesize_fringes;
use drum_core::model::{RotationState, SensorConfig};
use drum_core::optimizer::{speed_sweep, T2Profile};
use drum_core::readout::mc_sensitivity;
use drum_core::stability::{
    cumulative_phase, default_m_grid, overlapped_adev, synthesize_noise, NoiseKind,
};
use drum_core::SequenceParams;
use std::hint::black_box;

const MODE: &str = if cfg!(feature = "parallel") {
    "parallel"
} else {
    "sequential"
};

fn bench_fringes(c: &mut Criterion) {
    let sensor = SensorConfig::default();
    let rot = RotationState::default();
    let seq = SequenceParams::default();
    let b_range: Vec<f64> = (0..200_000).map(|i| i as f64 * 1e-11).collect();
    c.bench_with_input(
        BenchmarkId::new("fringe_scan_200k", MODE),
        &b_range,
        |b, range| b.iter(|| black_box(synthesize_fringes(range, &seq, &sensor, &rot, rot.phi0))),
    );
}

fn bench_mc(c: &mut Criterion) {
    let sensor = SensorConfig::default();
    let rot = RotationState::default();
    let seq = SequenceParams::default();
    let t_total = 2e5 * rot.period();
    c.bench_function(&format!("mc_sensitivity_1e5_pairs/{MODE}"), |b| {
        b.iter(|| {
            black_box(mc_sensitivity(&seq, &sensor, &rot, &sensor.readout, t_total, 3).unwrap())
        })
    });
}

fn bench_adev(c: &mut Criterion) {
    let n = 200_000;
    let series = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, n, 10.0, 1);
    let phase = cumulative_phase(&series.samples, series.poll_interval);
    let grid = default_m_grid(n);
    c.bench_function(&format!("overlapped_adev_200k/{MODE}"), |b| {
        b.iter(|| black_box(overlapped_adev(&phase, 10.0, &grid)))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let sensor = SensorConfig::default();
    let profile = T2Profile::default();
    let speeds: Vec<f64> = (0..41).map(|i| 1000.0 + 125.0 * i as f64).collect();
    c.bench_function(&format!("speed_sweep_41/{MODE}"), |b| {
        b.iter(|| black_box(speed_sweep(&speeds, &profile, &sensor)))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_fringes, bench_mc, bench_adev, bench_sweep
}
criterion_main!(benches);
