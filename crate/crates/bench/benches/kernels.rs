use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use monotone_core::lattice::FunctionLattice;
use monotone_core::mbf::generate_all;
use monotone_core::{CycleType, Engine, Method, Poset, VarPerm};

fn generation(c: &mut Criterion) {
    c.bench_function("generate_all 5", |b| {
        b.iter(|| generate_all(5).unwrap().len())
    });
}

fn ideals(c: &mut Criterion) {
    let cube = Poset::boolean(5);
    c.bench_function("count_ideals B^5", |b| b.iter(|| cube.count_ideals()));
    let p = VarPerm::parse("(12)(34)(56)", 7).unwrap();
    let op = monotone_core::OrbitPoset::new(&p).unwrap();
    c.bench_function("count_ideals orbits of (12)(34)(56) on 7", |b| {
        b.iter(|| op.poset().count_ideals())
    });
}

fn zeta(c: &mut Criterion) {
    let lattice =
        FunctionLattice::from_set(&VarPerm::identity(5), generate_all(5).unwrap()).unwrap();
    c.bench_function("zeta_down D_5", |b| {
        b.iter_batched(
            || vec![1u128; lattice.len()],
            |mut v| lattice.zeta_down(&mut v).unwrap(),
            BatchSize::LargeInput,
        )
    });
}

fn methods(c: &mut Criterion) {
    let mut g = c.benchmark_group("phi");
    g.sample_size(10);
    let cases = [
        ("(12)(34)(56)(789)", Method::Chain3),
        ("(12)(345)(6789)", Method::Chain3),
        ("(12)(34)(56)", Method::Involution),
        ("(123)(456)", Method::Threecycle),
        ("(1234)(5678)", Method::Basic),
    ];
    for (notation, method) in cases {
        let n = notation.chars().filter(char::is_ascii_digit).count().max(7);
        let t = CycleType::parse(notation, n).unwrap();
        g.bench_function(format!("{method} {notation} on {n}"), |b| {
            b.iter(|| Engine::default().run(method, &t).unwrap().value)
        });
    }
    g.finish();
}

criterion_group!(benches, generation, ideals, zeta, methods);
criterion_main!(benches);
