use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use g2census::census::enumerate;
use g2census::{classify, EnumerateConfig, Stratum};
use g2census_bench::h11_surfaces;
use std::hint::black_box;

fn bench_enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for n in [5usize, 6, 7] {
        for stratum in [Stratum::H2, Stratum::H11] {
            group.bench_with_input(BenchmarkId::new(stratum.name(), n), &n, |b, &n| {
                b.iter(|| enumerate(n, stratum, &EnumerateConfig::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_canonical_key(c: &mut Criterion) {
    let surfaces = h11_surfaces(8);
    c.bench_function("canonical_key/H11-8", |b| {
        b.iter(|| surfaces.iter().map(|o| black_box(o).canonical_key()).max())
    });
    c.bench_function("classify/H11-8", |b| {
        b.iter(|| {
            surfaces
                .iter()
                .filter(|o| classify(black_box(o)).unwrap().reduced)
                .count()
        })
    });
}

criterion_group!(benches, bench_enumerate, bench_canonical_key);
criterion_main!(benches);
