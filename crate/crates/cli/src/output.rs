//! The four commands and the files they write.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use ratlin::aaa::AaaStatus;
use ratlin::conj::{self, Node};
use ratlin::linalg::RealVector;
use ratlin::linearize::assemble_system_pencil;
use ratlin::models::{build_surrogate_system, load_system_matrix_market, Model, SplitFormSystem};
use ratlin::pipeline::{fit_system, group_poles, Fit};
use ratlin::refit::RefitApproximant;
use ratlin::timedomain::{
    initial_state_harmonic, initial_state_rest, simulate as integrate, ul_factorize,
    SimulationOptions,
};
use ratlin::Complex64;

use crate::config::{Init, ModelSource, RunConfig};
use crate::{Done, Failure};

fn system(cfg: &RunConfig) -> Result<SplitFormSystem, Failure> {
    Ok(match &cfg.model {
        ModelSource::Beam => build_surrogate_system(Model::Beam, cfg.n, cfg.fit.seed)?,
        ModelSource::Porous => build_surrogate_system(Model::Porous, cfg.n, cfg.fit.seed)?,
        ModelSource::Files(path) => load_system_matrix_market(path)?,
    })
}

fn fit(cfg: &RunConfig) -> Result<(SplitFormSystem, Fit), Failure> {
    let sys = system(cfg)?;
    let fit = fit_system(&sys, &cfg.fit)?;
    println!(
        "{}: degree {}, {:?}, basis dimension {}",
        cfg.fit.method,
        fit.aaa.approximant.degree(),
        fit.aaa.status,
        fit.lin.dim()
    );
    Ok((sys, fit))
}

fn out_dir(cfg: &RunConfig) -> Result<&Path, Failure> {
    fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

fn done(fit: &Fit) -> Done {
    if fit.converged() {
        Done::Ok
    } else {
        Done::NotConverged
    }
}

/// `f, abs_f1, err_f1, ...` on the sample grid.
fn approx_error_csv(fit: &Fit) -> Result<String, Failure> {
    let m = fit.m();
    let mut out = String::from("f");
    for j in 1..=m {
        let _ = write!(out, ",abs_f{j},err_f{j}");
    }
    out.push('\n');
    for (k, node) in fit.grid.nodes.iter().enumerate() {
        let s = node.value();
        let _ = write!(out, "{:.16e}", s.im / (2.0 * PI));
        for j in 0..m {
            let g = fit.targets[j][k];
            let _ = write!(
                out,
                ",{:.16e},{:.16e}",
                g.norm(),
                (fit.eval(j, s)? - g).norm()
            );
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct ApproximantDump<'a> {
    method: String,
    prep: &'static str,
    degree: usize,
    status: AaaStatus,
    max_error: f64,
    threshold: f64,
    support: &'a [Node],
    weights: &'a [Complex64],
    /// Poles of the final approximation, upper pair members only.
    poles: Vec<Node>,
    refit: &'a RefitApproximant,
    rms_error: Vec<f64>,
}

pub fn approximate(cfg: &RunConfig) -> Result<Done, Failure> {
    let (_, fit) = fit(cfg)?;
    let dir = out_dir(cfg)?;
    fs::write(dir.join("approx_error.csv"), approx_error_csv(&fit)?)?;
    let rms = fit.rms_errors()?;
    let dump = ApproximantDump {
        method: fit.method.to_string(),
        prep: cfg.fit.prep.name(),
        degree: fit.aaa.approximant.degree(),
        status: fit.aaa.status,
        max_error: fit.aaa.max_error,
        threshold: fit.aaa.threshold,
        support: &fit.aaa.approximant.support,
        weights: &fit.aaa.approximant.weights,
        poles: final_poles(&fit)?,
        refit: &fit.refit,
        rms_error: rms.clone(),
    };
    let mut json = serde_json::to_string_pretty(&dump).map_err(ratlin::Error::from)?;
    json.push('\n');
    fs::write(dir.join("approximant.json"), json)?;
    for (j, e) in rms.iter().enumerate() {
        println!("f{}: rms error {e:.3e}", j + 1);
    }
    Ok(done(&fit))
}

fn final_poles(fit: &Fit) -> Result<Vec<Node>, Failure> {
    let mut nodes = group_poles(&fit.refit.poles()?)?;
    nodes.sort_by(|a, b| {
        let (x, y) = (a.value(), b.value());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    Ok(nodes)
}

pub fn poles(cfg: &RunConfig) -> Result<Done, Failure> {
    let (_, fit) = fit(cfg)?;
    let dir = out_dir(cfg)?;
    let poles = conj::expand(&final_poles(&fit)?);
    let mut out = String::from("re,im,stable\n");
    for p in &poles {
        let _ = writeln!(out, "{:.16e},{:.16e},{}", p.re, p.im, (p.re < 0.0) as u8);
    }
    fs::write(dir.join("poles.csv"), out)?;
    let unstable = poles.iter().filter(|p| p.re >= 0.0).count();
    println!("{} poles, {unstable} unstable", poles.len());
    Ok(done(&fit))
}

pub fn linearize(cfg: &RunConfig) -> Result<Done, Failure> {
    let (sys, fit) = fit(cfg)?;
    let pencil = assemble_system_pencil(&sys, &fit.lin)?;
    let dir = out_dir(cfg)?;
    pencil.export(dir)?;
    // spot check: Schur complement against the refit on a few grid points
    let nodes = &fit.grid.nodes;
    let mut worst: f64 = 0.0;
    for node in nodes.iter().step_by((nodes.len() / 8).max(1)) {
        let s = node.value();
        for j in 0..fit.m() {
            let want = fit.refit.eval(j, s)?;
            let got = fit.lin.eval(j, s)?;
            worst = worst.max((got - want).norm() / want.norm().max(f64::MIN_POSITIVE));
        }
    }
    println!(
        "pencil of size {} (n = {}, basis dimension {}); Schur complement vs refit: max relative residual {worst:.3e}; \
         imaginary entries {}",
        pencil.dim(),
        pencil.n,
        pencil.basis_dim(),
        pencil.max_imaginary()
    );
    Ok(done(&fit))
}

/// Load vector `b0_i = sin(i + 1)` of the harmonic forcing.
fn load_vector(n: usize) -> RealVector {
    RealVector::from_fn(n, |i, _| ((i + 1) as f64).sin())
}

pub fn simulate(cfg: &RunConfig) -> Result<Done, Failure> {
    let (sys, fit) = fit(cfg)?;
    let pencil = assemble_system_pencil(&sys, &fit.lin)?;
    let n = pencil.n;
    let solver = ul_factorize(&pencil, cfg.dt, cfg.scheme)?;
    let opts = SimulationOptions {
        scheme: cfg.scheme,
        h: cfg.dt,
        steps: cfg.steps(),
        keep_states: false,
    };
    let b0 = load_vector(n);
    let omega = cfg.omega;
    let forcing = move |t: f64| match omega {
        Some(w) => &b0 * (w * t).cos(),
        None => RealVector::zeros(n),
    };
    let ts = match cfg.init {
        Init::Harmonic => {
            let hs = initial_state_harmonic(&pencil, omega.expect("validated"), &load_vector(n))?;
            let reference = |t: f64| hs.exact_physical(t);
            integrate(&solver, opts, &hs.initial(), &forcing, Some(&reference))?
        }
        Init::Rest => {
            let x0 = initial_state_rest(&pencil, &RealVector::from_element(n, 1.0))?;
            integrate(&solver, opts, &x0, &forcing, None)?
        }
        Init::Zero => integrate(
            &solver,
            opts,
            &RealVector::zeros(pencil.dim()),
            &forcing,
            None,
        )?,
    };
    let dir = out_dir(cfg)?;
    ts.write_csv(&dir.join("timeseries.csv"))?;
    match ts.max_error() {
        Some(e) => println!(
            "{} steps; max error against the harmonic solution {e:.3e}",
            ts.len() - 1
        ),
        None => println!(
            "{} steps; final norm {:.3e}",
            ts.len() - 1,
            ts.norms.last().copied().unwrap_or(0.0)
        ),
    }
    Ok(done(&fit))
}
