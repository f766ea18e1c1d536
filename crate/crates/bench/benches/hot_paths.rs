//! Benchmarks of the paths that dominate real runs: basis construction,
//! matrix-free operator application, dense and iterative eigensolves,
//! second-order coupling sums, and a small disorder ensemble.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use spinbus_core::{
    full_spectrum, j2_exact, lowest_k, make_uniform_chain, run_ensemble, Boundary,
    DisorderConfig, J2Component, Observable, SectorBasis, SectorHamiltonian, SolverOptions,
};

fn basis_construction(c: &mut Criterion) {
    c.bench_function("sector_basis_n16_half_filled", |b| {
        b.iter(|| SectorBasis::build(black_box(16), black_box(8)).unwrap())
    });
}

fn operator_apply(c: &mut Criterion) {
    let spec = make_uniform_chain(16, 1.0, 0.1).unwrap();
    let op = SectorHamiltonian::new(&spec, 8).unwrap();
    let v = vec![1.0 / (op.dim() as f64).sqrt(); op.dim()];
    let mut out = vec![0.0; op.dim()];
    c.bench_function("matrix_free_apply_n16_half_filled", |b| {
        b.iter(|| {
            op.apply(black_box(&v), &mut out);
            black_box(out[0])
        })
    });
}

fn dense_solve(c: &mut Criterion) {
    let spec = make_uniform_chain(10, 1.0, 0.0).unwrap();
    let opts = SolverOptions::default();
    c.bench_function("dense_full_spectrum_n10", |b| {
        b.iter(|| full_spectrum(black_box(&spec), &opts).unwrap().ground_energy())
    });
}

fn iterative_solve(c: &mut Criterion) {
    let spec = make_uniform_chain(14, 1.0, 0.0).unwrap();
    let mut opts = SolverOptions::default();
    // Force the Lanczos path even though the half-filled sector (dim 3432)
    // would fit the dense solver.
    opts.small_dense_dim = 1;
    c.bench_function("lanczos_lowest2_n14_half_filled", |b| {
        b.iter(|| {
            lowest_k(black_box(&spec), 2, Some(&[7]), &opts)
                .unwrap()
                .ground_energy()
        })
    });
}

fn coupling_sum(c: &mut Criterion) {
    let spec = make_uniform_chain(9, 1.0, 0.0).unwrap();
    let mut opts = SolverOptions::default();
    opts.keep_vectors = true;
    let sp = full_spectrum(&spec, &opts).unwrap();
    c.bench_function("j2_exact_end_to_end_n9", |b| {
        b.iter(|| {
            j2_exact(black_box(&sp), 0, 8, J2Component::Zz, opts.degeneracy_tol)
                .unwrap()
                .value
        })
    });
}

fn small_ensemble(c: &mut Criterion) {
    let config = DisorderConfig {
        n_sites: 5,
        boundary: Boundary::Open,
        b0: 0.1,
        sigma_j: 0.1,
        sigma_b: 0.05,
        n_samples: 32,
        master_seed: 7,
    };
    let observables = vec![
        Observable::parse("d01").unwrap(),
        Observable::parse("m_total").unwrap(),
        Observable::parse("k_zz_1_5").unwrap(),
    ];
    let opts = SolverOptions::default();
    c.bench_function("ensemble_32_samples_n5", |b| {
        b.iter_batched(
            || config.clone(),
            |cfg| run_ensemble(&cfg, &observables, &opts).unwrap().means[0],
            BatchSize::SmallInput,
        )
    });
}

fn configured() -> Criterion {
    Criterion::default().sample_size(10)
}

criterion_group! {
    name = benches;
    config = configured();
    targets = basis_construction, operator_apply, dense_solve, iterative_solve,
              coupling_sum, small_ensemble
}
criterion_main!(benches);
