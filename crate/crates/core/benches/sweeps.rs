use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use symsq::expsum::{kloosterman, KloostermanQuery};
use symsq::gaussian::all_up_to;
use symsq::kernel::TestFunctionSpec;
use symsq::moment::{kernel_branches, KernelForm, Profile};
use symsq::par::{map_with, Execution};
use symsq::zagier::SeriesContext;
use symsq::GaussianInt;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn kloosterman_sweep(c: &mut Criterion) {
    let moduli = all_up_to(400);
    let (m, n) = (GaussianInt::new(1, 1), GaussianInt::new(2, 0));
    let mut group = c.benchmark_group("kloosterman_sweep");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| map_with(exec, &moduli, |&cc| kloosterman(&KloostermanQuery::new(m, n, cc).unwrap()).unwrap()))
        });
    }
    group.finish();
}

fn series_context(c: &mut Criterion) {
    let s = Complex64::new(1.5, 0.0);
    let mut group = c.benchmark_group("zagier_local_data");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| SeriesContext::with_execution(black_box(s), 20_000, exec).unwrap())
        });
    }
    group.finish();
}

fn kernel_integral(c: &mut Criterion) {
    let spec = TestFunctionSpec::standard(20.0).unwrap();
    let s = Complex64::new(0.5, 0.0);
    let mut group = c.benchmark_group("kernel_i");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                kernel_branches(KernelForm::Hypergeometric, Complex64::new(1.0, 0.5), 0.3, s, Profile::Single(&spec), None, exec).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kloosterman_sweep, series_context, kernel_integral);
criterion_main!(benches);
