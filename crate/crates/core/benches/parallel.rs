//! Sequential against parallel execution on the main data-parallel kernels.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use framekit::channel::{self, ChannelOptions};
use framekit::frame::AnalyzeOptions;
use framekit::index::IndexDecomposition;
use framekit::measure::{frame_measure, MeasureOptions};
use framekit::models::{self, NonAdditivePair};
use framekit::operators::tracial_residual;
use framekit::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn analyze_opts(exec: Execution) -> AnalyzeOptions {
    AnalyzeOptions {
        exec,
        ..AnalyzeOptions::default()
    }
}

fn measure(c: &mut Criterion) {
    let pair = NonAdditivePair::new(NonAdditivePair::labels_for(128));
    let mut group = c.benchmark_group("frame_measure_pair_G");
    for (name, exec) in MODES {
        let opts = MeasureOptions {
            analyze: analyze_opts(exec),
            ..MeasureOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| frame_measure(black_box(&pair.g), o).unwrap())
        });
    }
    group.finish();
}

fn channel_sim(c: &mut Criterion) {
    let f = models::interleaved_double_basis(256);
    let mut group = c.benchmark_group("channel_2000_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = ChannelOptions {
            trials: 2000,
            seed: 1,
            analyze: analyze_opts(exec),
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| channel::simulate(black_box(&f), o).unwrap())
        });
    }
    group.finish();
}

fn tracial(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = models::random_dense_operator(&mut rng, Arc::new(IndexDecomposition::integer_boxes(256))).unwrap();
    let ts = t.adjoint();
    let mut group = c.benchmark_group("tracial_dense_513");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| tracial_residual(black_box(&t), &ts, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, measure, channel_sim, tracial);
criterion_main!(benches);
