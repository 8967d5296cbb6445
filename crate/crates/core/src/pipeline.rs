//! Approximation pipelines: AAA followed by an optional least-squares refit
//! and the scalar linearization of the result.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::{real_aaa, weighted_scaling, AaaResult, FunctionSet, SampleGrid, Scaling};
use crate::conj::{self, Node};
use crate::error::{Error, Result};
use crate::linearize::{
    scalar_linearization, strong_barycentric_linearization, ScalarLinearization,
};
use crate::models::{ScalarFunction, SplitFormSystem};
use crate::refit::{filter_poles, ls_refit, refit_with_poles, Basis, FilterMode, RefitApproximant};

/// Tolerances used to pair up computed poles.
pub const POLE_REAL_RTOL: f64 = 1e-9;
pub const POLE_MATCH_RTOL: f64 = 1e-6;

/// Default cap on the AAA degree.
pub const DEFAULT_MAX_DEGREE: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// The AAA approximant itself.
    #[serde(rename = "aaa")]
    Aaa,
    /// Barycentric least-squares refit on the AAA support.
    #[serde(rename = "aaa-ls")]
    AaaLs,
    /// As `AaaLs`, plus a quadratic polynomial.
    #[serde(rename = "e-aaa")]
    EAaa,
    /// Partial fractions on the stable AAA poles.
    #[serde(rename = "f-aaa")]
    FAaa,
    /// Partial fractions on the AAA poles with unstable ones reflected.
    #[serde(rename = "s-aaa")]
    SAaa,
    #[serde(rename = "e-f-aaa")]
    EFAaa,
    #[serde(rename = "e-s-aaa")]
    ESAaa,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Aaa,
        Method::AaaLs,
        Method::EAaa,
        Method::FAaa,
        Method::SAaa,
        Method::EFAaa,
        Method::ESAaa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Aaa => "aaa",
            Method::AaaLs => "aaa-ls",
            Method::EAaa => "e-aaa",
            Method::FAaa => "f-aaa",
            Method::SAaa => "s-aaa",
            Method::EFAaa => "e-f-aaa",
            Method::ESAaa => "e-s-aaa",
        }
    }

    pub fn extended(self) -> bool {
        matches!(self, Method::EAaa | Method::EFAaa | Method::ESAaa)
    }

    pub fn filter(self) -> Option<FilterMode> {
        match self {
            Method::FAaa | Method::EFAaa => Some(FilterMode::Drop),
            Method::SAaa | Method::ESAaa => Some(FilterMode::Flip),
            _ => None,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Division of the last function by a power of `s` before AAA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prep {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "g2/s")]
    OverS,
    #[serde(rename = "g2/s2")]
    OverS2,
}

impl Prep {
    pub fn power(self) -> i32 {
        match self {
            Prep::None => 0,
            Prep::OverS => 1,
            Prep::OverS2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Prep::None => "none",
            Prep::OverS => "g2/s",
            Prep::OverS2 => "g2/s2",
        }
    }

    /// Powers of `s` divided out of each of `m` functions.
    pub fn powers(self, m: usize) -> Result<Vec<i32>> {
        let mut p = vec![0; m];
        if self != Prep::None {
            if m < 2 {
                return Err(Error::InvalidParameter(format!(
                    "preprocessing '{}' needs a second nonlinear function",
                    self.name()
                )));
            }
            p[1] = self.power();
        }
        Ok(p)
    }
}

impl std::str::FromStr for Prep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Prep::None),
            "g2/s" => Ok(Prep::OverS),
            "g2/s2" | "g2/s^2" => Ok(Prep::OverS2),
            other => Err(Error::InvalidParameter(format!(
                "unknown preprocessing '{other}'"
            ))),
        }
    }
}

/// How the functions are weighed in AAA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    SetValued,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Frequency range in Hz.
    pub f_min: f64,
    pub f_max: f64,
    pub nz: usize,
    pub tol: f64,
    pub d_max: usize,
    pub method: Method,
    pub prep: Prep,
    pub scaling: ScalingMode,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            f_min: 1.0,
            f_max: 1e4,
            nz: 1000,
            tol: 1e-10,
            d_max: DEFAULT_MAX_DEGREE,
            method: Method::Aaa,
            prep: Prep::None,
            scaling: ScalingMode::Weighted,
            seed: 0,
        }
    }
}

/// Everything a pipeline run produces.
#[derive(Debug, Clone)]
pub struct Fit {
    pub method: Method,
    pub grid: SampleGrid,
    /// Samples of the functions of the system on the grid.
    pub targets: Vec<Vec<Complex64>>,
    pub powers: Vec<i32>,
    pub aaa: AaaResult,
    /// Poles of the AAA approximant.
    pub aaa_poles: Vec<Node>,
    /// Poles kept after filtering (for filtered methods).
    pub refit: RefitApproximant,
    pub lin: ScalarLinearization,
}

impl Fit {
    pub fn m(&self) -> usize {
        self.lin.m()
    }

    /// Approximation of function `j` of the system.
    pub fn eval(&self, j: usize, s: Complex64) -> Result<Complex64> {
        self.lin.eval(j, s)
    }

    /// Poles of the final approximation.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        self.lin.poles()
    }

    /// Grid root-mean-square error of every function.
    pub fn rms_errors(&self) -> Result<Vec<f64>> {
        let npts = self.grid.len() as f64;
        (0..self.m())
            .map(|j| {
                let mut acc = 0.0;
                for (node, g) in self.grid.nodes.iter().zip(&self.targets[j]) {
                    let e = (self.eval(j, node.value())? - g).norm_sqr();
                    acc += e * node.multiplicity() as f64;
                }
                Ok((acc / npts).sqrt())
            })
            .collect()
    }

    pub fn converged(&self) -> bool {
        self.aaa.status.is_converged()
    }
}

/// Poles as conjugate-closed nodes.
pub fn group_poles(poles: &[Complex64]) -> Result<Vec<Node>> {
    conj::group(poles, POLE_REAL_RTOL, POLE_MATCH_RTOL)
}

fn sample(functions: &[ScalarFunction], grid: &SampleGrid) -> Result<Vec<Vec<Complex64>>> {
    functions
        .iter()
        .map(|f| grid.nodes.iter().map(|n| f.eval(n.value())).collect())
        .collect()
}

/// Fit the functions of a split-form system.
pub fn fit_system(system: &SplitFormSystem, opts: &FitOptions) -> Result<Fit> {
    let grid = SampleGrid::log_imaginary(opts.f_min, opts.f_max, opts.nz)?;
    let powers = opts.prep.powers(system.m())?;
    let scaling = match opts.scaling {
        ScalingMode::SetValued => Scaling::SetValued,
        ScalingMode::Weighted => weighted_scaling(system, &grid, &powers, opts.seed)?,
    };
    fit_on_grid(&system.functions, grid, &powers, scaling, opts)
}

/// Fit stand-alone functions with set-valued scaling.
pub fn fit_functions(functions: &[ScalarFunction], opts: &FitOptions) -> Result<Fit> {
    let grid = SampleGrid::log_imaginary(opts.f_min, opts.f_max, opts.nz)?;
    let powers = opts.prep.powers(functions.len())?;
    fit_on_grid(functions, grid, &powers, Scaling::SetValued, opts)
}

/// Run AAA on `f_j / s^{p_j}` and post-process according to `opts.method`.
/// Refits always target the unscaled `f_j`.
pub fn fit_on_grid(
    functions: &[ScalarFunction],
    grid: SampleGrid,
    powers: &[i32],
    scaling: Scaling,
    opts: &FitOptions,
) -> Result<Fit> {
    let targets = sample(functions, &grid)?;
    let scaled: Vec<ScalarFunction> = functions
        .iter()
        .zip(powers)
        .map(|(f, &p)| f.times_power_of_s(-p))
        .collect();
    let fs = FunctionSet::sample(&scaled, &grid, scaling)?;
    let aaa = real_aaa(&fs, &grid, opts.tol, opts.d_max)?;
    let aaa_poles = group_poles(&aaa.approximant.poles()?)?;

    let (refit, lin) = match opts.method {
        Method::Aaa => {
            let mut lin = strong_barycentric_linearization(&aaa.approximant)?;
            for (j, &p) in powers.iter().enumerate() {
                for _ in 0..p {
                    lin.multiply_by_s(j)?;
                }
            }
            (RefitApproximant::from_barycentric(&aaa.approximant), lin)
        }
        Method::AaaLs | Method::EAaa => {
            let basis = Basis::Barycentric {
                support: aaa.approximant.support.clone(),
                weights: aaa.approximant.weights.clone(),
            };
            let refit = ls_refit(&targets, &grid, basis, opts.method.extended())?;
            let lin = scalar_linearization(&refit)?;
            (refit, lin)
        }
        method => {
            let mode = method.filter().expect("filtered method");
            let kept = filter_poles(&aaa_poles, mode);
            let refit = refit_with_poles(&targets, &grid, &kept, method.extended())?;
            let lin = scalar_linearization(&refit)?;
            (refit, lin)
        }
    };
    Ok(Fit {
        method: opts.method,
        grid,
        targets,
        powers: powers.to_vec(),
        aaa,
        aaa_poles,
        refit,
        lin,
    })
}
