//! Benchmarks for the hot paths: streaming kernel application, moment
//! table construction, and the GMRES solver.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use helmreg_core::geometry::{mesh_surface, Surface};
use helmreg_core::moments::{build_moment_table, MomentMethod};
use helmreg_core::operators::apply_batch;
use helmreg_core::quadrature::{build_composite, reference_rule};
use helmreg_core::solvers::{gmres, DenseOp};
use helmreg_core::{KernelContext, OperatorKind, C64};
use std::f64::consts::PI;

fn bench_kernel_apply(c: &mut Criterion) {
    let mesh = mesh_surface(&Surface::sphere(1.0), 0.3).unwrap();
    let quad = build_composite(&mesh, &reference_rule(4).unwrap());
    let n = quad.len();
    let x: Vec<C64> = (0..n)
        .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
        .collect();
    let mut group = c.benchmark_group("kernel_apply");
    group.sample_size(10);
    for kinds in [
        vec![OperatorKind::S],
        vec![
            OperatorKind::S,
            OperatorKind::K,
            OperatorKind::Kt,
            OperatorKind::H,
            OperatorKind::W,
        ],
    ] {
        let ctxs: Vec<KernelContext> = kinds
            .iter()
            .map(|&kind| KernelContext::new(kind, 5, PI, 0.2).unwrap())
            .collect();
        let refs: Vec<&KernelContext> = ctxs.iter().collect();
        let inputs: Vec<&[C64]> = vec![&x; kinds.len()];
        group.bench_with_input(
            BenchmarkId::new("batched", format!("{}ops_n{n}", kinds.len())),
            &(),
            |b, _| b.iter(|| apply_batch(&refs, &quad, &inputs).unwrap()),
        );
    }
    group.finish();
}

fn bench_moment_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("moment_table");
    for kappa in [0.5, 2.0, 8.0] {
        group.bench_with_input(BenchmarkId::from_parameter(kappa), &kappa, |b, &kappa| {
            b.iter(|| build_moment_table(kappa, 12, MomentMethod::Auto).unwrap())
        });
    }
    group.finish();
}

fn bench_gmres(c: &mut Criterion) {
    // Well-conditioned dense shifted system, 300 unknowns.
    let n = 300;
    let mut values = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let v = 0.05 * ((i * 7 + j * 13) as f64 * 0.61).sin() / (1.0 + (i + j) as f64);
            values[i * n + j] = C64::new(v, -0.3 * v);
        }
        values[i * n + i] += C64::new(1.0, 0.2);
    }
    let op = DenseOp { n, values };
    let rhs: Vec<C64> = (0..n)
        .map(|i| C64::new((i as f64 * 0.23).cos(), (i as f64 * 0.41).sin()))
        .collect();
    c.bench_function("gmres_dense_300", |b| {
        b.iter(|| gmres(&op, &rhs, 1e-10, 120).unwrap())
    });
}

criterion_group!(benches, bench_kernel_apply, bench_moment_table, bench_gmres);
criterion_main!(benches);
