use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use pbr_bench::histograms;
use pbr_core::distances::{evaluate_slices, MeasureId};
use std::hint::black_box;

fn measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("distance");
    for dims in [64, 1024] {
        let ds = histograms(dims, 1);
        let (x, y) = (ds.vectors()[0].values(), ds.vectors()[1].values());
        group.throughput(Throughput::Elements(dims as u64));
        for m in MeasureId::ALL {
            group.bench_with_input(BenchmarkId::new(m.name(), dims), &dims, |b, _| {
                b.iter(|| evaluate_slices(m, black_box(x), black_box(y)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, measures);
criterion_main!(benches);
