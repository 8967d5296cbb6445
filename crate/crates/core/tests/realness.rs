mod common;

use common::*;
use proptest::prelude::*;
use ratlin::aaa::{real_aaa, FunctionSet, SampleGrid, Scaling};
use ratlin::conj::Node;
use ratlin::linearize::assemble_system_pencil;
use ratlin::refit::{filter_poles, FilterMode};

const TOL: f64 = 1e-12;

fn point() -> impl Strategy<Value = ratlin::Complex64> {
    (-40.0f64..40.0, -300.0f64..300.0).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refit_and_linearization_commute_with_conjugation(seed in 0u64..20, s in point()) {
        let inst = instance(seed);
        for j in 0..inst.lin.m() {
            prop_assert!(conj_defect(|z| inst.refit.eval(j, z).unwrap(), s) <= TOL);
            prop_assert!(conj_defect(|z| inst.lin.eval(j, z).unwrap(), s) <= TOL);
        }
        for k in 0..inst.lin.dim() {
            prop_assert!(conj_defect(|z| inst.lin.basis(z).unwrap()[k], s) <= TOL);
        }
        let pencil = assemble_system_pencil(&inst.system, &inst.lin).unwrap();
        let r = pencil.r_matrix(s).unwrap();
        let rc = pencil.r_matrix(s.conj()).unwrap();
        prop_assert!((rc - r.map(|z| z.conj())).norm() <= TOL * (1.0 + r.norm()));
    }

    #[test]
    fn aaa_approximant_commutes_with_conjugation(tol_exp in 4i32..12, s in point()) {
        let grid = SampleGrid::log_imaginary(0.1, 100.0, 200).unwrap();
        let fs = FunctionSet::sample(&test_functions(2), &grid, Scaling::SetValued).unwrap();
        let r = real_aaa(&fs, &grid, 10f64.powi(-tol_exp), 30).unwrap().approximant;
        for j in 0..2 {
            prop_assert!(conj_defect(|z| r.eval(j, z).unwrap(), s) <= TOL);
        }
        // the pole set is closed under conjugation
        let poles = r.poles().unwrap();
        for p in &poles {
            let best = poles.iter().map(|q| (q - p.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-8 * p.norm().max(1.0));
        }
    }

    #[test]
    fn filters_keep_conjugate_pairs(re in -100.0f64..100.0, im in 0.0f64..100.0) {
        let poles = vec![Node::real(re), Node::pair(c(re, im + 1.0)), Node::real(-1.0)];
        let dropped = filter_poles(&poles, FilterMode::Drop);
        let flipped = filter_poles(&poles, FilterMode::Flip);
        prop_assert_eq!(flipped.len(), poles.len());
        for n in dropped.iter().chain(&flipped) {
            prop_assert!(n.value().re <= 0.0);
        }
    }
}

#[test]
fn emitted_pencils_are_real() {
    for seed in 0..20 {
        let inst = instance(seed);
        let pencil = assemble_system_pencil(&inst.system, &inst.lin).unwrap();
        assert_eq!(pencil.max_imaginary(), 0.0);
        let dir = tempfile::tempdir().unwrap();
        pencil.export(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("A.mtx")).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real"));
    }
}
