use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use korobov_cnn::{
    build_approximator, build_basis_net, build_product_net, build_selector, LevelIndex,
    SparseExpansion, TermPolicy,
};

fn bench_selector(c: &mut Criterion) {
    let mut group = c.benchmark_group("selector-plan");
    for d in [4usize, 8, 16, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| {
                for m in 1..=d {
                    for n in 1..=d {
                        std::hint::black_box(build_selector(m, n, d).unwrap());
                    }
                }
            })
        });
    }
    group.finish();
}

fn bench_product_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("product-net-build");
    for (n, d) in [(2usize, 4usize), (4, 4), (4, 8)] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_d{d}")),
            &(n, d),
            |b, &(n, d)| b.iter(|| std::hint::black_box(build_product_net(n, d, 1).unwrap())),
        );
    }
    group.finish();
}

fn bench_basis_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("basis-net-build");
    for d in [4usize, 8] {
        let li = LevelIndex::new(vec![1; d * d], vec![1; d * d]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| std::hint::black_box(build_basis_net(&li, 2, d, 1).unwrap()))
        });
    }
    group.finish();
}

fn bench_approximator_construction(c: &mut Criterion) {
    let d = 4usize;
    let li = LevelIndex::new(vec![1; d * d], vec![1; d * d]).unwrap();
    let exp = SparseExpansion::from_terms(d * d, 2, vec![(li, 1.0)]).unwrap();
    c.bench_function("approximator-build-full-n2-d4", |b| {
        b.iter(|| {
            std::hint::black_box(
                build_approximator(&exp, 2, d, 1, TermPolicy::FullBudget).unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    bench_selector,
    bench_product_construction,
    bench_basis_construction,
    bench_approximator_construction
);
criterion_main!(benches);
