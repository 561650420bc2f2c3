use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use biexciton::optimizer::{grid_scan, Objective, SearchSpace};
use biexciton::{DotParameters, PulseScheme, SchemeKind, Setup, SimConfig};

fn setup() -> Setup {
    Setup::new(DotParameters::typical(2).unwrap(), SimConfig::default()).unwrap()
}

fn propagation(c: &mut Criterion) {
    let s = setup();
    let scheme = PulseScheme::pi_pulses(&s.params, SchemeKind::Sequential, 1000.0);
    c.bench_function("propagate sequential π pulses", |b| b.iter(|| s.run(scheme).unwrap()));
}

/// Same 27-point grid through the worker pool and through a plain loop.
fn grid(c: &mut Criterion) {
    let s = setup();
    let space = SearchSpace::around_pi_pulses(&s, SchemeKind::Sequential, 1000.0);
    let obj = Objective::default();
    let resolution = [3, 3, 3];
    let mut group = c.benchmark_group("grid 3x3x3");
    group.sample_size(10);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    group.bench_function(BenchmarkId::new("pool", threads), |b| {
        b.iter(|| grid_scan(&space, &resolution, &s, &obj, 100).unwrap())
    });
    group.bench_function("serial loop", |b| {
        b.iter(|| {
            let pts: Vec<Vec<f64>> = (0..27)
                .map(|i| {
                    let idx = [i / 9, (i / 3) % 3, i % 3];
                    space
                        .axes
                        .iter()
                        .zip(idx)
                        .map(|(a, k)| a.lower + (a.upper - a.lower) * k as f64 / 2.0)
                        .collect()
                })
                .collect();
            pts.iter().map(|x| obj.evaluate(&s, space.scheme_at(x)).unwrap()).collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, propagation, grid);
criterion_main!(benches);
