use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use difforge::autocorr::{eberlein_study, EberleinConfig};
use difforge::lfamily::l_set;
use difforge::phase::{construct, verify_diffraction, PhaseForm};
use difforge::testfn::standard_probes;
use difforge::{Execution, PointWeighting, SpectralMeasure, Q};
use num_traits::{One, Zero};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn verification(c: &mut Criterion) {
    let spec = SpectralMeasure::new(PointWeighting::lattice(Q::one(), Q::zero())).unwrap();
    let obj = construct(&spec, &PhaseForm::set_sign(l_set())).unwrap();
    let probes = standard_probes();
    let mut group = c.benchmark_group("verify_diffraction");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_diffraction(black_box(&obj), &probes, 1e-6, exec).unwrap())
        });
    }
    group.finish();
}

fn eberlein(c: &mut Criterion) {
    let w = PointWeighting::lattice(Q::new(1, 3), Q::zero());
    let z = PointWeighting::lattice(Q::one(), Q::zero());
    let probes: Vec<_> = standard_probes().into_iter().take(8).collect();
    let mut group = c.benchmark_group("eberlein_study");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = EberleinConfig {
            exec,
            ..EberleinConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| {
                eberlein_study(
                    black_box(&w),
                    &z,
                    &[100.0, 200.0, 400.0],
                    &probes,
                    1e-12,
                    cfg,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, verification, eberlein);
criterion_main!(benches);
