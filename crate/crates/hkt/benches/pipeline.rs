//! Parallel (default rayon pool) against sequential (a single worker) on the
//! main computational kernels. Build with `--no-default-features` to measure
//! the purely sequential code path without rayon at all.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hkt::catalog::{self, CatalogEntry};
use hkt::curvature::{bianchi_check, curvature};
use hkt::hermitian::bismut_connection;
use hkt::par;
use hkt::verify::{verify_all, verify_entry, Options};
use hkt::Scalar;

fn paths() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", 0)]
}

fn curvature_kernels<S: Scalar>(c: &mut Criterion, label: &str, e: &CatalogEntry<S>) {
    let h = &e.data.hermitian_structures()[0];
    let conn = bismut_connection(h);
    let mut group = c.benchmark_group(format!("curvature/{label}"));
    group.sample_size(10);
    for (name, jobs) in paths() {
        group.bench_function(BenchmarkId::new("riemann", name), |b| {
            b.iter(|| par::with_jobs(jobs, || curvature(&conn, &h.algebra, &h.g)))
        });
        group.bench_function(BenchmarkId::new("bianchi", name), |b| {
            b.iter(|| par::with_jobs(jobs, || bianchi_check(&conn, &h.algebra, &h.g)))
        });
    }
    group.finish();
}

fn bench_curvature(c: &mut Criterion) {
    let su3 = catalog::su3_samelson();
    curvature_kernels(c, "su3_exact", &su3);
    curvature_kernels(c, "su3_float", &su3.to_float());
}

fn bench_verify(c: &mut Criterion) {
    let su3 = catalog::su3_samelson();
    let all: Vec<_> = catalog::standard_entries().iter().map(|e| e.to_float()).collect();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for (name, jobs) in paths() {
        group.bench_function(BenchmarkId::new("su3_exact", name), |b| {
            b.iter(|| par::with_jobs(jobs, || verify_entry(&su3, Options::default()).expect("verifies")))
        });
        group.bench_function(BenchmarkId::new("catalog_float", name), |b| {
            b.iter(|| par::with_jobs(jobs, || verify_all(&all, Options::default())))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_curvature, bench_verify);
criterion_main!(benches);
