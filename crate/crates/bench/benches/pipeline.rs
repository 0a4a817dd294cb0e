use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mc3d::complex::{reduce, ReduceMode};
use mc3d::pipeline::{hex_decompose, param_decompose};
use mc3d::quantize::quantize;
use mc3d::sanitize::sanitize;
use mc3d::tet::hex_to_param;
use mc3d::trace::{trace_hex, TraceOptions};
use mc3d_bench::meshes;

fn tracing(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace");
    for (name, m) in meshes() {
        g.bench_with_input(BenchmarkId::new("hex", name), &m, |b, m| b.iter(|| trace_hex(m, &TraceOptions::default())));
        let pm = hex_to_param(&m);
        g.bench_with_input(BenchmarkId::new("param", name), &pm, |b, pm| {
            b.iter(|| param_decompose(pm, &TraceOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduce");
    for (name, m) in meshes() {
        let (cm, dec) = hex_decompose(&m, &TraceOptions::default()).unwrap();
        g.bench_function(name, |b| b.iter(|| reduce(&cm, dec.raw.clone(), ReduceMode::Full).unwrap()));
    }
    g.finish();
}

fn sanitizing(c: &mut Criterion) {
    let mut g = c.benchmark_group("sanitize");
    for (name, m) in meshes() {
        let pm = hex_to_param(&m);
        g.bench_function(name, |b| b.iter(|| sanitize(&pm).unwrap()));
    }
    g.finish();
}

fn quantizing(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantize");
    g.sample_size(10);
    for (name, m) in meshes() {
        let (tr, dec) = param_decompose(&hex_to_param(&m), &TraceOptions::default()).unwrap();
        for s in [1.0, 2.0] {
            g.bench_function(BenchmarkId::new(name, s), |b| b.iter(|| quantize(tr.mesh.cells(), &dec.full, s).unwrap()));
        }
    }
    g.finish();
}

criterion_group!(benches, tracing, reduction, sanitizing, quantizing);
criterion_main!(benches);
