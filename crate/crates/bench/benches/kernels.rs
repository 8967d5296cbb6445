use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use ratlin::aaa::{real_aaa, FunctionSet, SampleGrid, Scaling};
use ratlin::linalg::RealVector;
use ratlin::linearize::assemble_system_pencil;
use ratlin::models::{beam_function, build_surrogate_system, BeamMaterial, Model};
use ratlin::pipeline::{fit_system, FitOptions, Method};
use ratlin::timedomain::{ul_factorize, DenseShiftedSolver, Scheme, ShiftedSolve};

fn aaa(c: &mut Criterion) {
    let grid = SampleGrid::log_imaginary(1.0, 1e4, 1000).unwrap();
    let fs = FunctionSet::sample(
        &[beam_function(BeamMaterial::default())],
        &grid,
        Scaling::SetValued,
    )
    .unwrap();
    let mut group = c.benchmark_group("real_aaa");
    for tol in [1e-7, 1e-13] {
        group.bench_function(format!("beam nz=1000 tol={tol:e}"), |b| {
            b.iter(|| real_aaa(&fs, &grid, tol, 200).unwrap())
        });
    }
    group.finish();
}

fn solves(c: &mut Criterion) {
    let sys = build_surrogate_system(Model::Porous, 100, 0).unwrap();
    let opts = FitOptions {
        f_max: 100.0,
        nz: 1000,
        tol: 1e-12,
        method: Method::EFAaa,
        ..Default::default()
    };
    let fit = fit_system(&sys, &opts).unwrap();
    let pencil = assemble_system_pencil(&sys, &fit.lin).unwrap();
    let h = 1e-3;
    let f = RealVector::from_fn(pencil.dim(), |i, _| (0.1 * i as f64).sin());
    let mut group = c.benchmark_group(format!("shifted solve, dimension {}", pencil.dim()));
    group.bench_function("structured factorize", |b| {
        b.iter(|| ul_factorize(&pencil, h, Scheme::BackwardEuler).unwrap())
    });
    let structured = ul_factorize(&pencil, h, Scheme::BackwardEuler).unwrap();
    group.bench_function("structured solve", |b| {
        b.iter(|| structured.solve(&f).unwrap())
    });
    let dense = DenseShiftedSolver::from_pencil(&pencil, 1.0 / h).unwrap();
    group.bench_function("dense solve", |b| b.iter(|| dense.solve(&f).unwrap()));
    group.bench_function("structured step", |b| {
        b.iter_batched(
            || f.clone(),
            |x| {
                ratlin::timedomain::step(&structured, Scheme::BackwardEuler, h, &x, 0.0, &|_| {
                    RealVector::zeros(100)
                })
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, aaa, solves);
criterion_main!(benches);
