//! Criterion microbenchmarks for the two computation paths and the two
//! execution modes. The `bench` library module (and the CLI `bench`
//! subcommand) produce the scaling CSVs; this suite is for quick local
//! comparisons with statistical reporting.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tpds::datagen::{random_tensor, Dist};
use tpds::informativity::{informative_controllability, informative_sysid, CheckConfig, Method};
use tpds::tensor3::{t_product_fourier, t_product_literal};
use tpds::ExecMode;

fn check_cfg(method: Method, exec: ExecMode) -> CheckConfig {
    CheckConfig {
        method,
        tol_rank_rel: None,
        tol_stab: 1e-9,
        seed: 17,
        exec,
    }
}

/// Transform path vs dense unfolding oracle on the rank test.
fn sysid_methods(c: &mut Criterion) {
    let mut g = c.benchmark_group("sysid-method");
    g.sample_size(20);
    for p in [4u32, 6, 8] {
        let r = 1usize << p;
        let x0 = random_tensor(2, 20, r, 11, Dist::StandardNormal);
        g.bench_with_input(BenchmarkId::new("fourier", r), &x0, |b, x0| {
            let cfg = check_cfg(Method::Fourier, ExecMode::Sequential);
            b.iter(|| informative_sysid(x0, &cfg).unwrap().verdict)
        });
        g.bench_with_input(BenchmarkId::new("unfold", r), &x0, |b, x0| {
            let cfg = check_cfg(Method::Dense, ExecMode::Sequential);
            b.iter(|| informative_sysid(x0, &cfg).unwrap().verdict)
        });
    }
    g.finish();
}

/// Sequential loop vs rayon data-parallel map over frequency blocks.
/// Without the `parallel` feature both arms run the sequential fallback.
fn exec_modes(c: &mut Criterion) {
    let mut g = c.benchmark_group("fourier-exec");
    g.sample_size(20);
    let r = 1usize << 9;
    let x0 = random_tensor(6, 60, r, 13, Dist::StandardNormal);
    let x1 = random_tensor(6, 60, r, 14, Dist::StandardNormal);
    for (name, exec) in [
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ] {
        let cfg = check_cfg(Method::Fourier, exec);
        g.bench_function(BenchmarkId::new("sysid", name), |b| {
            b.iter(|| informative_sysid(&x0, &cfg).unwrap().verdict)
        });
        g.bench_function(BenchmarkId::new("controllability", name), |b| {
            b.iter(|| {
                informative_controllability(None, &x0, &x1, &cfg)
                    .unwrap()
                    .verdict
            })
        });
    }
    g.finish();
}

/// Circular-convolution product: direct slice convolution vs transform.
fn product_paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("t-product");
    g.sample_size(20);
    for r in [16usize, 64, 256] {
        let a = random_tensor(8, 8, r, 3, Dist::StandardNormal);
        let b = random_tensor(8, 8, r, 4, Dist::StandardNormal);
        g.bench_with_input(BenchmarkId::new("literal", r), &r, |bch, _| {
            bch.iter(|| t_product_literal(&a, &b).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fourier", r), &r, |bch, _| {
            bch.iter(|| t_product_fourier(&a, &b).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sysid_methods, exec_modes, product_paths);
criterion_main!(benches);
