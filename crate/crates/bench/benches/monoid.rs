use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use divmon_core::{census, quasi_center, CensusOptions, Engine, Monoid, QuadraticPresentation};

fn m35() -> QuadraticPresentation {
    QuadraticPresentation::from_relations(&["x", "y", "z"], &[("x x", "y z"), ("y y", "z x"), ("z z", "x y")]).unwrap()
}

fn normal_forms(c: &mut Criterion) {
    let reversing = Monoid::divisibility(m35()).unwrap();
    let enumeration = Monoid::new(m35()).with_engine(Engine::Enumeration).unwrap();
    let word = "y z x y z x y z";
    c.bench_function("nf/reversing", |b| b.iter(|| reversing.parse_element(black_box(word)).unwrap()));
    c.bench_function("nf/enumeration", |b| b.iter(|| enumeration.parse_element(black_box(word)).unwrap()));
}

fn lcm(c: &mut Criterion) {
    let m = Monoid::divisibility(m35()).unwrap();
    let a = m.parse_element("x y z x").unwrap();
    let b = m.parse_element("z z y").unwrap();
    c.bench_function("lcm/m35", |bench| bench.iter(|| m.right_lcm(black_box(&a), black_box(&b)).unwrap()));
    c.bench_function("quasi_center/m35", |bench| bench.iter(|| quasi_center(black_box(&m)).unwrap()));
}

fn census_rank3(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    group.bench_function("rank3", |b| b.iter(|| census(black_box(3), &CensusOptions::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, normal_forms, lcm, census_rank3);
criterion_main!(benches);
