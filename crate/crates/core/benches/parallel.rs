//! Sequential versus rayon execution of the data-parallel kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hblab::boundary::literal::parse_function;
use hblab::clark::{alpha_grid, clark_family, clark_measure};
use hblab::cyclicity::decay_table;
use hblab::hb::HbSpace;
use hblab::par::Exec;
use hblab::poly::CPoly;
use hblab::scalar::C64;
use hblab::Config;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn space(b: &str, exec: Exec) -> HbSpace {
    HbSpace::new(parse_function(b).unwrap(), Config::default().with_exec(exec)).unwrap()
}

fn decay(c: &mut Criterion) {
    let mut g = c.benchmark_group("decay_table_n128");
    let f = CPoly::from_real(&[1.0, 0.3, -0.2, 0.1]);
    for (name, exec) in MODES {
        let s = space("(1+z)/2", exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| decay_table(black_box(&s), &f, 128).unwrap()));
    }
    g.finish();
}

fn clark(c: &mut Criterion) {
    let mut g = c.benchmark_group("clark_measure");
    for (name, exec) in MODES {
        let s = space("z(1+z)/2", exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| clark_measure(black_box(&s), C64::new(1.0, 0.0)).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("alpha_sweep_16");
    g.sample_size(10);
    for (name, exec) in MODES {
        let s = space("(3z+z^2)/4", exec);
        let alphas = alpha_grid(&s, 16).unwrap();
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| clark_family(black_box(&s), &alphas).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, decay, clark, sweep);
criterion_main!(benches);
