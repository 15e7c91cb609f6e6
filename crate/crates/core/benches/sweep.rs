//! Sequential versus rayon-pool execution of a small velocity sweep, plus
//! the raw cost of one split step.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tunnelclock::experiments::{velocity_sweep, Executor, ScenarioConfig};
use tunnelclock::physics::{init_soliton, square_barrier, BarrierSpec, PacketSpec};
use tunnelclock::spectral::{Grid, SplitStepper};

fn small_config() -> ScenarioConfig {
    ScenarioConfig {
        n: 1024,
        dt: 2e-3,
        ..Default::default()
    }
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("split step");
    for n in [1024usize, 4096] {
        let grid = Arc::new(Grid::new(-60.0, 60.0, n).unwrap());
        let barrier = BarrierSpec::new(2.0, 1.0).unwrap();
        let potential = square_barrier(&grid, &barrier).unwrap();
        let mut field = init_soliton(grid.clone(), &PacketSpec::new(-15.0, 2.0)).unwrap();
        let mut stepper = SplitStepper::new(grid, potential, 2.0, 1e-3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| stepper.step(black_box(&mut field)))
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let base = small_config();
    let velocities = [2.2, 2.6, 3.0, 3.4, 3.8, 4.2];
    let workers = std::thread::available_parallelism().map_or(2, |n| n.get().max(2));
    let mut group = c.benchmark_group("velocity sweep");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    group.bench_function("sequential", |b| {
        let exec = Executor::sequential();
        b.iter(|| velocity_sweep(&base, black_box(&velocities), &exec).unwrap())
    });
    group.bench_function(BenchmarkId::new("pool", workers), |b| {
        let exec = Executor::new(workers);
        b.iter(|| velocity_sweep(&base, black_box(&velocities), &exec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_step, bench_sweep);
criterion_main!(benches);
