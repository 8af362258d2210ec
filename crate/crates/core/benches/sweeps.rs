use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lipfree::classify::{length_space_test, MidBudget};
use lipfree::corpus::{ExampleKind, ExampleSpec};
use lipfree::exec::{self, Mode};
use lipfree::free::{slice_min_separation, SliceSpec};
use lipfree::lipschitz::{lipschitz_constant, plateau};
use lipfree::metric::trivial_segment_pairs;

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn segments(c: &mut Criterion) {
    let space = ExampleSpec::new(ExampleKind::HalflineInterval, 200).generate().unwrap();
    let mut g = c.benchmark_group("trivial_segment_pairs");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_mode(mode);
            b.iter(|| trivial_segment_pairs(black_box(&space), 0.005, 0.005).unwrap())
        });
    }
    g.finish();
}

fn length(c: &mut Criterion) {
    let space = ExampleSpec::new(ExampleKind::Circle, 256).generate().unwrap();
    let mut g = c.benchmark_group("length_space_test");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            exec::set_mode(mode);
            b.iter(|| length_space_test(black_box(&space), MidBudget::Relative(2.0)).unwrap())
        });
    }
    g.finish();
}

fn slices(c: &mut Criterion) {
    let space = ExampleSpec::new(ExampleKind::QuotientMetric, 400).generate().unwrap();
    let (x, y) = (space.index_of("x0").unwrap(), space.index_of("x1").unwrap());
    let f = plateau(&space, x, y, 0.1).unwrap();
    let slice = SliceSpec::new(&space, &f, 0.2).unwrap();
    let mut g = c.benchmark_group("plateau_slice");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new("min_separation", name), |b| {
            exec::set_mode(mode);
            b.iter(|| slice_min_separation(black_box(&space), &slice))
        });
        g.bench_function(BenchmarkId::new("lipschitz_constant", name), |b| {
            exec::set_mode(mode);
            b.iter(|| lipschitz_constant(black_box(&space), &f))
        });
    }
    g.finish();
}

criterion_group!(benches, segments, length, slices);
criterion_main!(benches);
