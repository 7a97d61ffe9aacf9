use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use deforma::artin::{tensor_nilpotent, ArtinAlgebra};
use deforma::convolution::HomDgla;
use deforma::fixtures;
use deforma::par::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn validate(c: &mut Criterion) {
    let m = fixtures::load("gl2").unwrap();
    let a = ArtinAlgebra::truncated_polynomial(2, 3).unwrap();
    let host = tensor_nilpotent(m.dgla("gl2").unwrap(), &a).unwrap();
    let mut group = c.benchmark_group("validate gl2 x A(2,3)");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| host.dgla().validate_with(exec)));
    }
    group.finish();
}

fn convolution(c: &mut Criterion) {
    let m = fixtures::load("gl2").unwrap();
    let g = m.dgla("gl2").unwrap();
    let mut group = c.benchmark_group("hom gl2 gl2 arity 4");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| HomDgla::with_exec(g, g, 4, exec).unwrap())
        });
    }
    group.finish();
}

fn cartan(c: &mut Criterion) {
    let m = fixtures::load("elliptic").unwrap();
    let i = m.cartan_homotopy("i").unwrap();
    let mut group = c.benchmark_group("cartan check elliptic");
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| i.check_with(exec)));
    }
    group.finish();
}

criterion_group!(benches, validate, convolution, cartan);
criterion_main!(benches);
