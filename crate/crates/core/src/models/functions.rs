use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional derivative viscoelastic layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamMaterial {
    /// Static shear modulus (Pa).
    pub g0: f64,
    /// Asymptotic shear modulus (Pa).
    pub ginf: f64,
    /// Relaxation time (s).
    pub tau: f64,
    pub alpha: f64,
}

impl Default for BeamMaterial {
    fn default() -> Self {
        Self {
            g0: 350.4e3,
            ginf: 3.062e6,
            tau: 8.23e-9,
            alpha: 0.675,
        }
    }
}

impl BeamMaterial {
    pub fn validate(&self) -> Result<()> {
        let ok = self.g0 > 0.0
            && self.ginf > 0.0
            && self.tau > 0.0
            && self.alpha > 0.0
            && self.alpha < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("beam material {self:?}")))
        }
    }
}

/// Air and rigid-frame porous material (Johnson-Champoux-Allard model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PorousMaterial {
    /// Air density (kg/m^3).
    pub rho0: f64,
    /// Speed of sound (m/s).
    pub c0: f64,
    pub prandtl: f64,
    /// Heat capacity ratio.
    pub gamma: f64,
    /// Dynamic viscosity (kg/(m s)).
    pub eta: f64,
    pub phi: f64,
    /// Tortuosity.
    pub alpha_inf: f64,
    /// Flow resistivity (N s/m^4).
    pub sigma: f64,
    /// Viscous characteristic length (m).
    pub lambda: f64,
    /// Thermal characteristic length (m).
    pub lambda_p: f64,
}

impl Default for PorousMaterial {
    fn default() -> Self {
        Self {
            rho0: 1.213,
            c0: 342.0,
            prandtl: 0.72,
            gamma: 1.4,
            eta: 0.1837e-6,
            phi: 0.98,
            alpha_inf: 1.7,
            sigma: 13500.0,
            lambda: 80e-6,
            lambda_p: 160e-6,
        }
    }
}

impl PorousMaterial {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.rho0,
            self.c0,
            self.prandtl,
            self.gamma,
            self.eta,
            self.phi,
            self.alpha_inf,
            self.sigma,
            self.lambda,
            self.lambda_p,
        ]
        .iter()
        .all(|&x| x > 0.0 && x.is_finite());
        if all_positive && self.phi <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("porous material {self:?}")))
        }
    }

    /// Branch point of the viscous square root in `g1`.
    pub fn g1_branch_point(&self) -> f64 {
        let m = self;
        -(m.sigma * m.lambda * m.phi).powi(2) / (4.0 * m.alpha_inf.powi(2) * m.eta * m.rho0)
    }

    /// Branch point of the thermal square root in `g2`.
    pub fn g2_branch_point(&self) -> f64 {
        -16.0 * self.eta / (self.rho0 * self.prandtl * self.lambda_p.powi(2))
    }

    /// Closed-form pole of `g2`, where the dynamic compressibility factor vanishes.
    pub fn g2_pole(&self) -> f64 {
        -(17f64.sqrt() - 1.0) * 2.0 * self.eta / (self.lambda_p.powi(2) * self.prandtl * self.rho0)
    }

    /// `s * rho0 * alpha_inf * alpha(s) / alpha_inf`, i.e. `s rho0 alpha_inf + sigma phi G_J(s)`.
    /// Its zeros are the poles of `g1`.
    pub fn g1_denominator(&self, s: Complex64) -> Complex64 {
        let m = self;
        s * m.rho0 * m.alpha_inf + m.sigma * m.phi * self.gj(s)
    }

    /// `s * alpha'(s)`; its zeros are the poles of `g2`.
    pub fn g2_denominator(&self, s: Complex64) -> Complex64 {
        let m = self;
        let a = 8.0 * m.eta / (m.lambda_p.powi(2) * m.prandtl * m.rho0);
        s + a * self.thermal_root(s)
    }

    fn gj(&self, s: Complex64) -> Complex64 {
        let m = self;
        let c = 4.0 * m.alpha_inf.powi(2) * m.eta * m.rho0 / (m.sigma * m.lambda * m.phi).powi(2);
        (1.0 + c * s).sqrt()
    }

    fn thermal_root(&self, s: Complex64) -> Complex64 {
        let m = self;
        (1.0 + s * (m.rho0 * m.prandtl * m.lambda_p.powi(2) / (16.0 * m.eta))).sqrt()
    }
}

fn on_cut(s: Complex64, start: f64) -> bool {
    s.im == 0.0 && s.re <= start
}

/// Shear modulus `(G0 + Ginf (s tau)^alpha) / (1 + (s tau)^alpha)`, principal branch.
pub fn beam_g1(s: Complex64, mat: &BeamMaterial) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(mat.g0, 0.0));
    }
    if on_cut(s, 0.0) {
        return Err(Error::BranchCut {
            function: "beam_g1",
            s,
        });
    }
    let p = (s * mat.tau).powf(mat.alpha);
    Ok((mat.g0 + p * mat.ginf) / (1.0 + p))
}

/// `phi / alpha(s)` with the dynamic tortuosity `alpha(s)`.
pub fn porous_g1(s: Complex64, mat: &PorousMaterial) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::PoleAtOrigin {
            function: "porous_g1",
        });
    }
    if on_cut(s, mat.g1_branch_point()) {
        return Err(Error::BranchCut {
            function: "porous_g1",
            s,
        });
    }
    let m = mat;
    let alpha = m.alpha_inf * (1.0 + (m.sigma * m.phi / (s * m.rho0 * m.alpha_inf)) * m.gj(s));
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(s));
    }
    Ok(m.phi / alpha)
}

/// `phi (gamma - (gamma - 1) / alpha'(s))` with the thermal factor `alpha'(s)`.
pub fn porous_g2(s: Complex64, mat: &PorousMaterial) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::PoleAtOrigin {
            function: "porous_g2",
        });
    }
    if on_cut(s, mat.g2_branch_point()) {
        return Err(Error::BranchCut {
            function: "porous_g2",
            s,
        });
    }
    let m = mat;
    let ap =
        1.0 + (8.0 * m.eta / (m.lambda_p.powi(2) * m.prandtl * s * m.rho0)) * m.thermal_root(s);
    if ap == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(s));
    }
    Ok(m.phi * (m.gamma - (m.gamma - 1.0) / ap))
}

type Eval = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A named scalar function of `s`, cheap to clone.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    f: Arc<Eval>,
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// Wrap an infallible closure.
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, move |s| Ok(f(s)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        (self.f)(s)
    }

    /// `s -> self(s) * s^power`; negative powers divide.
    pub fn times_power_of_s(&self, power: i32) -> Self {
        if power == 0 {
            return self.clone();
        }
        let inner = self.clone();
        let name = match power {
            1 => format!("s*{}", self.name),
            -1 => format!("{}/s", self.name),
            p if p > 0 => format!("s^{p}*{}", self.name),
            p => format!("{}/s^{}", self.name, -p),
        };
        Self::new(name, move |s| {
            if power < 0 && s == Complex64::new(0.0, 0.0) {
                return Err(Error::PoleAtOrigin {
                    function: "scaled model function",
                });
            }
            Ok(inner.eval(s)? * s.powi(power))
        })
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .finish()
    }
}

pub fn beam_function(mat: BeamMaterial) -> ScalarFunction {
    ScalarFunction::new("beam_g1", move |s| beam_g1(s, &mat))
}

pub fn porous_g1_function(mat: PorousMaterial) -> ScalarFunction {
    ScalarFunction::new("porous_g1", move |s| porous_g1(s, &mat))
}

pub fn porous_g2_function(mat: PorousMaterial) -> ScalarFunction {
    ScalarFunction::new("porous_g2", move |s| porous_g2(s, &mat))
}
