use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cpx_bench::{body11, body23, minimax_instance, torus, two_shell_reinhardt};
use cpx_core::extremal::{chebyshev_family, upper_envelope};
use cpx_core::lattice::MultiIndexBasis;
use cpx_core::minimax::{solve_minimax, SolverOptions};
use cpx_core::nodes::{greedy_fekete, vdm_log_abs};

fn bench_minimax(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimax_solve");
    for m in [16u32, 32] {
        // a union of two shells keeps the certificate gap open for a few
        // Lawson iterations, so this measures real solver work
        let k = two_shell_reinhardt(m);
        let problem = minimax_instance(body11());
        g.bench_with_input(BenchmarkId::from_parameter(k.len()), &k, |b, k| {
            b.iter(|| {
                solve_minimax(black_box(&problem), k, SolverOptions::default()).expect("solves")
            })
        });
    }
    g.finish();
}

fn bench_greedy_fekete(c: &mut Criterion) {
    let mut g = c.benchmark_group("greedy_fekete");
    for (n, m) in [(4u32, 24u32), (6, 32)] {
        let k = torus(m);
        let basis = MultiIndexBasis::new(body11(), n);
        let label = format!("n{}_pts{}", n, k.len());
        g.bench_with_input(BenchmarkId::from_parameter(label), &k, |b, k| {
            b.iter(|| greedy_fekete(black_box(k), &basis).expect("selects"))
        });
    }
    g.finish();
}

fn bench_vdm_log_abs(c: &mut Criterion) {
    let mut g = c.benchmark_group("vdm_log_abs");
    for n in [4u32, 8] {
        let basis = MultiIndexBasis::new(body23(), n);
        let k = torus(20);
        let pts = &k.points()[..basis.len()];
        g.bench_with_input(BenchmarkId::from_parameter(basis.len()), &basis, |b, basis| {
            b.iter(|| vdm_log_abs(black_box(pts), basis).expect("square system"))
        });
    }
    g.finish();
}

fn bench_envelope(c: &mut Criterion) {
    let k = torus(32);
    let (family, _) = chebyshev_family(body11(), 6, &k, SolverOptions::default()).expect("family");
    let probe = cpx_core::cpoly::CPoint::new(
        num_complex::Complex64::new(1.3, 0.4),
        num_complex::Complex64::new(-0.2, 1.7),
    );
    c.bench_function("upper_envelope", |b| {
        b.iter(|| upper_envelope(black_box(&family), black_box(probe)))
    });
}

criterion_group!(
    kernels,
    bench_minimax,
    bench_greedy_fekete,
    bench_vdm_log_abs,
    bench_envelope
);
criterion_main!(kernels);
