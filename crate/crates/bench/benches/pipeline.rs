use criterion::{criterion_group, criterion_main, Criterion};
use groupable_bench::families;
use groupable_core::oracle::{greedy_slalom_h, FinSeq, GreedySlalom};
use groupable_core::{b_pipeline, Nat};

fn pipeline(c: &mut Criterion) {
    let ys = families(16, 10);
    c.bench_function("b_pipeline (16 families)", |b| b.iter(|| ys.iter().filter(|y| b_pipeline(y, 0).unwrap().succeeded()).count()));

    let materialized: Vec<Vec<FinSeq>> = ys
        .iter()
        .map(|y| y.enumerations().unwrap().iter().map(|(_, f)| FinSeq::of(f, 10_000)).collect())
        .collect();
    c.bench_function("greedy_slalom_h at 10000 (16 families)", |b| {
        b.iter(|| materialized.iter().filter(|m| matches!(greedy_slalom_h(m, &Nat::from(0u32)).unwrap(), GreedySlalom::Boundaries(_))).count())
    });
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
