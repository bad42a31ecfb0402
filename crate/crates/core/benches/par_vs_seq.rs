use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbitrsh::bundle::{Cover, LineBundle};
use orbitrsh::dynsys::{fixed, System, Tolerances};
use orbitrsh::par::Exec;
use orbitrsh::pipeline;
use orbitrsh::rep::{corpus, rsh, Model};

fn golden_model() -> Model {
    let cf: Vec<u64> = std::iter::once(0).chain(std::iter::repeat_n(1, 100)).collect();
    let sys = System::rotation(fixed::from_continued_fraction(&cf).unwrap(), 128, Tolerances::default()).unwrap();
    let y = sys.arcs_from_decimals(&[("0".into(), "0.5".into(), true, true)]).unwrap();
    Model::new(LineBundle::circle_degree(sys, Cover::circle_default(), 1).unwrap(), y).unwrap()
}

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("seq", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("par", Exec::Parallel));
    }
    v
}

fn bench(c: &mut Criterion) {
    let m = golden_model();
    let words = corpus::random_words(&m, 24, 1);

    let mut g = c.benchmark_group("covariance");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(pipeline::covariance_suite(&m, 400, 2, exec).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("gauge");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(pipeline::gauge_suite(&m, 100, 3, exec).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("rsh");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(rsh::assemble_rsh(&m, &words, 16, 4, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench
}
criterion_main!(benches);
