use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use korobov_cnn::{
    build_approximator, build_basis_net, build_product_net, LevelIndex, SparseExpansion,
    TermPolicy, UniformStream,
};

fn bench_product_forward(c: &mut Criterion) {
    let mut group = c.benchmark_group("product-net-forward");
    for (n, d) in [(2usize, 4usize), (4, 8)] {
        let net = build_product_net(n, d, 1).unwrap();
        let mut rng = UniformStream::new(17);
        let x = rng.next_tensor(1, d);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}_d{d}")),
            &net,
            |b, net| b.iter(|| std::hint::black_box(net.evaluate(&x).unwrap())),
        );
    }
    group.finish();
}

fn bench_basis_forward(c: &mut Criterion) {
    let d = 4usize;
    let li = LevelIndex::new(vec![1; d * d], vec![1; d * d]).unwrap();
    let net = build_basis_net(&li, 2, d, 1).unwrap();
    let mut rng = UniformStream::new(18);
    let x = rng.next_tensor(1, d);
    c.bench_function("basis-net-forward-n2-d4", |b| {
        b.iter(|| std::hint::black_box(net.evaluate(&x).unwrap()))
    });
}

fn bench_approximator_forward(c: &mut Criterion) {
    let d = 4usize;
    let li = LevelIndex::new(vec![1; d * d], vec![1; d * d]).unwrap();
    let exp = SparseExpansion::from_terms(d * d, 2, vec![(li, 1.0)]).unwrap();
    let app = build_approximator(&exp, 2, d, 1, TermPolicy::FullBudget).unwrap();
    let mut rng = UniformStream::new(19);
    let x = rng.next_tensor(1, d);
    c.bench_function("approximator-forward-full-n2-d4", |b| {
        b.iter(|| std::hint::black_box(app.evaluate(&x).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_product_forward,
    bench_basis_forward,
    bench_approximator_forward
);
criterion_main!(benches);
