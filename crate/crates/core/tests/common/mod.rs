#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratlin::aaa::{real_aaa, FunctionSet, SampleGrid, Scaling};
use ratlin::conj::Node;
use ratlin::linalg::{ComplexMatrix, RealMatrix};
use ratlin::linearize::{scalar_linearization, ScalarLinearization};
use ratlin::models::{ScalarFunction, SplitFormSystem};
use ratlin::refit::{ls_refit, Basis, PoleBasis, PoleBasisKind, RefitApproximant};
use ratlin::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth real test functions on the imaginary axis.
pub fn test_functions(m: usize) -> Vec<ScalarFunction> {
    (0..m)
        .map(|j| {
            let a = 3.0 + 4.0 * j as f64;
            ScalarFunction::from_fn(format!("f{j}"), move |s: Complex64| {
                (s + 2.0) / (s * s + s * a + 30.0 * a) + (1.0 + s / 50.0).sqrt() * (j as f64 + 0.5)
            })
        })
        .collect()
}

pub fn sample(functions: &[ScalarFunction], grid: &SampleGrid) -> Vec<Vec<Complex64>> {
    functions
        .iter()
        .map(|f| {
            grid.nodes
                .iter()
                .map(|n| f.eval(n.value()).unwrap())
                .collect()
        })
        .collect()
}

fn symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> RealMatrix {
    let m = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&m + m.transpose()) * (0.5 * scale)
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SplitFormSystem {
    let a0 = symmetric(rng, n, 50.0) + RealMatrix::identity(n, n) * 100.0;
    let a1 = symmetric(rng, n, 1.0);
    let a2 = symmetric(rng, n, 0.1);
    let aneg = (0..m)
        .map(|_| RealMatrix::from_fn(n, n, |_, _| rng.random_range(-10.0..10.0)))
        .collect();
    SplitFormSystem::new(a0, a1, a2, aneg, test_functions(m)).unwrap()
}

pub fn random_stable_poles(rng: &mut ChaCha8Rng, reals: usize, pairs: usize) -> Vec<Node> {
    let mut out: Vec<Node> = (0..reals)
        .map(|_| Node::real(-rng.random_range(1.0..60.0)))
        .collect();
    out.extend((0..pairs).map(|_| {
        Node::pair(c(
            -rng.random_range(1.0..40.0),
            rng.random_range(2.0..120.0),
        ))
    }));
    out
}

pub struct Instance {
    pub system: SplitFormSystem,
    pub grid: SampleGrid,
    pub refit: RefitApproximant,
    pub lin: ScalarLinearization,
}

/// Seeded instance with `n <= 5` and `d~ <= 10`, cycling through partial
/// fraction, inverse Newton and barycentric bases.
pub fn instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let n = 1 + (seed % 5) as usize;
    let m = 1 + (seed % 2) as usize;
    let system = random_system(&mut r, n, m);
    let grid = SampleGrid::log_imaginary(0.05, 50.0, 120).unwrap();
    let values = sample(&system.functions, &grid);
    let extended = seed % 4 < 2;
    let refit = match seed % 3 {
        0 | 1 => {
            let kind = if seed.is_multiple_of(3) {
                PoleBasisKind::PartialFraction
            } else {
                PoleBasisKind::InverseNewton
            };
            let reals = r.random_range(0..=3);
            let pairs = r.random_range(if reals == 0 { 1 } else { 0 }..=3);
            let poles = random_stable_poles(&mut r, reals, pairs);
            let basis = PoleBasis::new(kind, &poles, &grid).unwrap();
            ls_refit(&values, &grid, Basis::Poles(basis), extended).unwrap()
        }
        _ => {
            let fs = FunctionSet::sample(&system.functions, &grid, Scaling::SetValued).unwrap();
            let aaa = real_aaa(&fs, &grid, 1e-8, 8).unwrap();
            let basis = Basis::Barycentric {
                support: aaa.approximant.support.clone(),
                weights: aaa.approximant.weights.clone(),
            };
            ls_refit(&values, &grid, basis, extended).unwrap()
        }
    };
    let lin = scalar_linearization(&refit).unwrap();
    assert!(lin.dim() <= 10, "basis dimension {}", lin.dim());
    Instance {
        system,
        grid,
        refit,
        lin,
    }
}

pub fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    c(
        rng.random_range(-30.0..30.0),
        rng.random_range(-200.0..200.0),
    )
}

pub fn sigma_extremes(m: &ComplexMatrix) -> (f64, f64) {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    (min, max)
}

/// `|f(conj s) - conj f(s)| / (1 + |f(s)|)`.
pub fn conj_defect(f: impl Fn(Complex64) -> Complex64, s: Complex64) -> f64 {
    let a = f(s);
    (f(s.conj()) - a.conj()).norm() / (1.0 + a.norm())
}
