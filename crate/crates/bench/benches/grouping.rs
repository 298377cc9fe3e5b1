use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use groupable_bench::large_covers;
use groupable_core::{group_cover, verify_witness};

fn grouping(c: &mut Criterion) {
    let mut group = c.benchmark_group("group_cover");
    for points in [1, 3, 5] {
        let covers = large_covers(32, points);
        group.bench_with_input(BenchmarkId::from_parameter(points), &covers, |b, covers| {
            b.iter(|| covers.iter().map(|c| group_cover(black_box(c)).unwrap().trace.step_count()).sum::<usize>())
        });
    }
    group.finish();

    let covers = large_covers(32, 5);
    let witnesses: Vec<_> = covers.iter().map(|c| group_cover(c).unwrap().witness).collect();
    c.bench_function("verify_witness exact (32 covers)", |b| {
        b.iter(|| covers.iter().zip(&witnesses).filter(|(c, w)| verify_witness(c, w, 0).unwrap().passes()).count())
    });
}

criterion_group!(benches, grouping);
criterion_main!(benches);
