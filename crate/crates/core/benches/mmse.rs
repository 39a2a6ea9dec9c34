//! Sequential vs rayon execution of the Monte Carlo MMSE estimator.
//!
//! Both modes produce bit-identical estimates; only wall time differs.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use spikelink::codec::{CodecConfig, Scheme};
use spikelink::estimator::Estimator;
use spikelink::exec::Execution;

const TRIALS: u64 = 8_192;

fn estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate");
    group.sample_size(10);
    group.throughput(Throughput::Elements(TRIALS));
    for (scheme, n_bits, train_len) in [(Scheme::Burst, 8, 64), (Scheme::Phase, 8, 32), (Scheme::Rate, 4, 32)] {
        let cfg = CodecConfig::new(n_bits, train_len).unwrap();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let est = Estimator::new(scheme, &cfg).unwrap().with_execution(exec);
            let id = BenchmarkId::new(label, format!("{scheme}/Nb{n_bits}/L{train_len}"));
            group.bench_with_input(id, &est, |b, est| {
                b.iter(|| est.estimate(black_box(1.0), TRIALS, 7).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, estimate);
criterion_main!(benches);
