mod common;

use common::c;
use ratlin::models::{build_surrogate_system, Model};
use ratlin::pipeline::*;

fn porous(method: Method, prep: Prep) -> Fit {
    let sys = build_surrogate_system(Model::Porous, 10, 5).unwrap();
    let opts = FitOptions {
        f_max: 100.0,
        nz: 400,
        tol: 1e-12,
        method,
        prep,
        ..Default::default()
    };
    fit_system(&sys, &opts).unwrap()
}

#[test]
fn method_and_prep_names_round_trip() {
    for m in Method::ALL {
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            format!("\"{}\"", m.name())
        );
    }
    assert!("q-aaa".parse::<Method>().is_err());
    assert_eq!("g2/s^2".parse::<Prep>().unwrap(), Prep::OverS2);
    assert_eq!("g2/s".parse::<Prep>().unwrap(), Prep::OverS);
    assert!(Prep::OverS.powers(1).is_err());
    assert_eq!(Prep::OverS2.powers(2).unwrap(), vec![0, 2]);
}

#[test]
fn every_method_approximates_the_porous_functions() {
    for method in Method::ALL {
        let fit = porous(method, Prep::None);
        assert!(fit.converged(), "{method}");
        let rms = fit.rms_errors().unwrap();
        // relative to the size of each function on the grid
        for (j, e) in rms.iter().enumerate() {
            let scale = fit.targets[j].iter().map(|z| z.norm()).fold(0.0, f64::max);
            let bound = match method {
                Method::FAaa | Method::SAaa => 1e-1,
                _ => 1e-3,
            };
            assert!(
                *e <= bound * scale,
                "{method} f{j}: rms {e:e}, scale {scale:e}"
            );
        }
    }
}

#[test]
fn filtered_methods_only_have_stable_poles() {
    for method in [Method::FAaa, Method::SAaa, Method::EFAaa, Method::ESAaa] {
        let fit = porous(method, Prep::None);
        assert!(fit.poles().unwrap().iter().all(|p| p.re < 0.0), "{method}");
    }
}

#[test]
fn preprocessing_keeps_the_original_targets() {
    for prep in [Prep::OverS, Prep::OverS2] {
        for method in [Method::Aaa, Method::EAaa] {
            let fit = porous(method, prep);
            assert_eq!(fit.powers, prep.powers(2).unwrap());
            let s = c(0.0, 2.0 * std::f64::consts::PI * 30.0);
            let sys = build_surrogate_system(Model::Porous, 10, 5).unwrap();
            let want = sys.functions[1].eval(s).unwrap();
            let got = fit.eval(1, s).unwrap();
            assert!(
                (got - want).norm() <= 1e-6 * want.norm(),
                "{method} {}: {got} vs {want}",
                prep.name()
            );
        }
    }
}

#[test]
fn extended_refit_is_never_worse() {
    for prep in [Prep::None, Prep::OverS2] {
        let base = porous(Method::AaaLs, prep);
        let ls = base.rms_errors().unwrap();
        let ext = porous(Method::EAaa, prep).rms_errors().unwrap();
        for (j, (l, e)) in ls.iter().zip(&ext).enumerate() {
            // up to the truncation level of the least-squares solver
            let scale = base.targets[j].iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(
                *e <= *l * (1.0 + 1e-8) + 1e-8 * scale,
                "{} f{j}: {l:e} {e:e}",
                prep.name()
            );
        }
    }
}

#[test]
fn set_valued_fit_of_plain_functions() {
    let opts = FitOptions {
        f_max: 100.0,
        nz: 300,
        tol: 1e-10,
        ..Default::default()
    };
    let fit = fit_functions(&common::test_functions(2), &opts).unwrap();
    assert!(fit.converged());
    for e in fit.rms_errors().unwrap() {
        assert!(e < 1e-8);
    }
}

#[test]
fn pole_grouping_pairs_conjugates() {
    let nodes = group_poles(&[c(-1.0, 2.0), c(-3.0, 0.0), c(-1.0, -2.0)]).unwrap();
    assert_eq!(nodes.len(), 2);
    assert!(group_poles(&[c(-1.0, 2.0)]).is_err());
}
