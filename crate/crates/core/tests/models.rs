use std::f64::consts::PI;

use proptest::prelude::*;
use ratlin::models::*;
use ratlin::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn probes() -> [Complex64; 3] {
    [
        c(0.0, 2.0 * PI * 100.0),
        c(0.0, 2.0 * PI),
        c(-300.0, 4000.0),
    ]
}

fn assert_close(got: Complex64, want: Complex64, rtol: f64) {
    let err = (got - want).norm() / want.norm();
    assert!(
        err <= rtol,
        "got {got}, want {want}, relative error {err:e}"
    );
}

// Reference values computed with 30-digit mpmath.
#[test]
fn beam_g1_matches_high_precision_reference() {
    let mat = BeamMaterial::default();
    let want = [
        c(350758.08791289354488, 639.05860326775874539),
        c(350415.99078825994763, 28.552901758823470968),
        c(351538.16423519529789, 2292.4872695646971693),
    ];
    for (s, w) in probes().into_iter().zip(want) {
        assert_close(beam_g1(s, &mat).unwrap(), w, 1e-13);
    }
}

#[test]
fn porous_g1_matches_high_precision_reference() {
    let mat = PorousMaterial::default();
    let want = [
        c(0.0055159676052343936696, 0.055911388101342217882),
        c(5.5696515369915461521e-7, 0.00056455528588663482846),
        c(0.15358568758204234318, 0.27594120950047566101),
    ];
    for (s, w) in probes().into_iter().zip(want) {
        assert_close(porous_g1(s, &mat).unwrap(), w, 1e-12);
    }
}

#[test]
fn porous_g2_matches_high_precision_reference() {
    let mat = PorousMaterial::default();
    let want = [
        c(1.0380594817139735375, -0.052293065210974831235),
        c(1.3675883716625033826, -0.036933766635161669603),
        c(1.0038150435496499173, -0.023363692244922812386),
    ];
    for (s, w) in probes().into_iter().zip(want) {
        assert_close(porous_g2(s, &mat).unwrap(), w, 1e-13);
    }
}

#[test]
fn g2_pole_and_branch_points() {
    let mat = PorousMaterial::default();
    assert!((mat.g2_pole() - -51.320698887232591926).abs() < 1e-10);
    assert!((mat.g2_branch_point() - -131.46068058990565174).abs() < 1e-10);
    assert!(mat.g2_denominator(c(mat.g2_pole(), 0.0)).norm() < 1e-9);
    let bp = mat.g1_branch_point();
    assert!(bp < -4.3e5 && bp > -4.4e5, "g1 branch point {bp}");
}

#[test]
fn g1_pole_is_a_real_root_of_the_denominator() {
    let mat = PorousMaterial::default();
    let f = |x: f64| mat.g1_denominator(c(x, 0.0)).re;
    let (mut lo, mut hi) = (-7000.0, -6000.0);
    assert!(f(lo).signum() != f(hi).signum());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    assert!((root + 6368.0).abs() < 5.0, "root {root}");
    assert!(mat.g1_denominator(c(root, 0.0)).im.abs() < 1e-9);
    assert!(porous_g1(c(root, 1e-3), &mat).unwrap().norm() > 1e3);
}

#[test]
fn branch_cuts_and_origin_are_reported() {
    let beam = BeamMaterial::default();
    let por = PorousMaterial::default();
    assert_eq!(beam_g1(c(0.0, 0.0), &beam).unwrap(), c(beam.g0, 0.0));
    assert!(matches!(
        beam_g1(c(-1.0, 0.0), &beam),
        Err(ratlin::Error::BranchCut { .. })
    ));
    assert!(matches!(
        porous_g1(c(0.0, 0.0), &por),
        Err(ratlin::Error::PoleAtOrigin { .. })
    ));
    assert!(matches!(
        porous_g2(c(-200.0, 0.0), &por),
        Err(ratlin::Error::BranchCut { .. })
    ));
    // right of the branch point the functions are real
    assert!(porous_g2(c(-10.0, 0.0), &por).unwrap().im.abs() < 1e-14);
}

#[test]
fn surrogates_are_deterministic_and_scaled() {
    let a = build_surrogate_system(Model::Beam, 12, 3).unwrap();
    let b = build_surrogate_system(Model::Beam, 12, 3).unwrap();
    let d = build_surrogate_system(Model::Beam, 12, 4).unwrap();
    assert_eq!(a.a0, b.a0);
    assert_ne!(a.a0, d.a0);
    let n2 = |m: &ratlin::linalg::RealMatrix| ratlin::linalg::norm2(m);
    assert!((n2(&a.a0) / BEAM_A0_NORM - 1.0).abs() < 1e-12);
    assert!((n2(&a.a2) / BEAM_A2_NORM - 1.0).abs() < 1e-12);
    assert!((n2(&a.aneg[0]) / BEAM_ANEG_NORM - 1.0).abs() < 1e-12);
    assert_eq!(a.a0, a.a0.transpose());

    let small = build_surrogate_system(Model::Beam, 2, 0).unwrap();
    assert_eq!(small.n(), 2);
    let m = small.eval(c(0.0, 2.0 * PI * 100.0)).unwrap();
    assert!(m.lu().determinant().norm() > 0.0);

    let p = build_surrogate_system(Model::Porous, 10, 0).unwrap();
    assert_eq!(p.m(), 2);
    assert!(build_surrogate_system(Model::Porous, 1, 0).is_err());
}

#[test]
fn matrix_market_round_trip() {
    let sys = build_surrogate_system(Model::Porous, 6, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a0.mtx");
    write_matrix_market(&path, &sys.a0).unwrap();
    let back = read_matrix_market(&path).unwrap();
    assert_eq!(back, sys.a0);
}

proptest! {
    #[test]
    fn functions_commute_with_conjugation(re in -2000.0f64..2000.0, im in 1e-3f64..1e5) {
        let s = c(re, im);
        let beam = BeamMaterial::default();
        let por = PorousMaterial::default();
        let checks: [(Complex64, Complex64); 3] = [
            (beam_g1(s.conj(), &beam).unwrap(), beam_g1(s, &beam).unwrap()),
            (porous_g1(s.conj(), &por).unwrap(), porous_g1(s, &por).unwrap()),
            (porous_g2(s.conj(), &por).unwrap(), porous_g2(s, &por).unwrap()),
        ];
        for (lhs, rhs) in checks {
            prop_assert!((lhs - rhs.conj()).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
