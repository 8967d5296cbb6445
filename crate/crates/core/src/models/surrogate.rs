//! Seeded desk-scale stand-ins for finite element matrices.
//!
//! Both models are one-dimensional chains of two-node elements whose element
//! coefficients are perturbed by a seeded generator, so that runs are
//! reproducible but the matrices are not trivially Toeplitz.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::functions::{
    beam_function, porous_g1_function, porous_g2_function, BeamMaterial, PorousMaterial,
};
use super::system::SplitFormSystem;
use crate::error::{Error, Result};
use crate::linalg::{norm2, RealMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Beam,
    Porous,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beam" => Ok(Model::Beam),
            "porous" => Ok(Model::Porous),
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

/// Target 2-norms of the beam matrices.
pub const BEAM_A0_NORM: f64 = 2e9;
pub const BEAM_A2_NORM: f64 = 1e-3;
pub const BEAM_ANEG_NORM: f64 = 4e2;

/// Geometry of the porous duct surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuctGeometry {
    /// Duct length (m).
    pub length: f64,
    /// Fraction of the elements, at the closed end, filled with porous material.
    pub porous_fraction: f64,
    /// Relative weight of the porous stiffness and mass against the air ones.
    pub porous_weight: f64,
}

impl Default for DuctGeometry {
    fn default() -> Self {
        Self {
            length: 10.0,
            porous_fraction: 0.5,
            porous_weight: 4.0,
        }
    }
}

fn factors(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(lo..hi)).collect()
}

/// Stiffness of a chain of `n` free nodes; element `e` joins nodes `e-1` and `e`.
/// Node `-1` is clamped. With `clamp_right`, an extra element ties node `n-1` to
/// a clamped node `n`.
fn chain_stiffness(n: usize, k: &[f64], clamp_right: bool) -> RealMatrix {
    let mut out = RealMatrix::zeros(n, n);
    let elements = if clamp_right { n + 1 } else { n };
    for e in 0..elements {
        let ke = k[e];
        let left = e.checked_sub(1);
        let right = if e < n { Some(e) } else { None };
        if let Some(i) = left {
            out[(i, i)] += ke;
        }
        if let Some(j) = right {
            out[(j, j)] += ke;
        }
        if let (Some(i), Some(j)) = (left, right) {
            out[(i, j)] -= ke;
            out[(j, i)] -= ke;
        }
    }
    out
}

fn lumped_mass(n: usize, l: &[f64], clamp_right: bool) -> RealMatrix {
    let mut out = RealMatrix::zeros(n, n);
    let elements = if clamp_right { n + 1 } else { n };
    for e in 0..elements {
        if let Some(i) = e.checked_sub(1) {
            out[(i, i)] += 0.5 * l[e];
        }
        if e < n {
            out[(e, e)] += 0.5 * l[e];
        }
    }
    out
}

fn scaled(m: RealMatrix, target: f64) -> RealMatrix {
    let nrm = norm2(&m);
    m * (target / nrm)
}

/// Clamped sandwich beam stand-in: `A(s) = A0 + s^2 A2 + g1(s) A_{-1}`.
pub fn beam_surrogate(n: usize, seed: u64, mat: BeamMaterial) -> Result<SplitFormSystem> {
    if n < 2 {
        return Err(Error::Dimension(format!("surrogate needs n >= 2, got {n}")));
    }
    mat.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_face = factors(&mut rng, n + 1, 0.8, 1.2);
    let lengths = factors(&mut rng, n + 1, 0.8, 1.2);
    let k_core = factors(&mut rng, n + 1, 0.5, 1.5);
    let a0 = scaled(chain_stiffness(n, &k_face, true), BEAM_A0_NORM);
    let a2 = scaled(lumped_mass(n, &lengths, true), BEAM_A2_NORM);
    let aneg = scaled(chain_stiffness(n, &k_core, true), BEAM_ANEG_NORM);
    SplitFormSystem::new(
        a0,
        RealMatrix::zeros(n, n),
        a2,
        vec![aneg],
        vec![beam_function(mat)],
    )
}

/// Air duct with a porous layer at its closed end:
/// `A(s) = (K_a + K_p g1/phi)/rho0 + s^2 (M_a + M_p g2/phi)/(rho0 c0^2)`,
/// in split form with `f1 = g1` and `f2 = s^2 g2`.
///
/// The open end (pressure release) keeps `K_a` nonsingular.
pub fn porous_surrogate(
    n: usize,
    seed: u64,
    mat: PorousMaterial,
    geo: DuctGeometry,
) -> Result<SplitFormSystem> {
    if n < 2 {
        return Err(Error::Dimension(format!("surrogate needs n >= 2, got {n}")));
    }
    mat.validate()?;
    if !(geo.length > 0.0 && (0.0..=1.0).contains(&geo.porous_fraction) && geo.porous_weight > 0.0)
    {
        return Err(Error::InvalidParameter(format!("duct geometry {geo:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let he = geo.length / n as f64;
    let lengths: Vec<f64> = factors(&mut rng, n, 0.9, 1.1)
        .into_iter()
        .map(|f| f * he)
        .collect();
    let stiff: Vec<f64> = lengths.iter().map(|l| 1.0 / l).collect();
    let first_porous = n - ((geo.porous_fraction * n as f64).round() as usize).min(n);
    let porous = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(e, x)| {
                if e >= first_porous {
                    geo.porous_weight * x
                } else {
                    0.0
                }
            })
            .collect()
    };
    // the air fills the whole duct, the porous layer adds its own paths
    let ka = chain_stiffness(n, &stiff, false);
    let ma = lumped_mass(n, &lengths, false);
    let kp = chain_stiffness(n, &porous(&stiff), false);
    let mp = lumped_mass(n, &porous(&lengths), false);

    let rho0 = mat.rho0;
    let c2 = mat.c0 * mat.c0;
    let a0 = ka / rho0;
    let a2 = ma / (rho0 * c2);
    let an1 = kp / (mat.phi * rho0);
    let an2 = mp / (mat.phi * rho0 * c2);
    let f2 = porous_g2_function(mat).times_power_of_s(2);
    SplitFormSystem::new(
        a0,
        RealMatrix::zeros(n, n),
        a2,
        vec![an1, an2],
        vec![porous_g1_function(mat), f2],
    )
}

/// Surrogate with default materials and geometry.
pub fn build_surrogate_system(model: Model, n: usize, seed: u64) -> Result<SplitFormSystem> {
    match model {
        Model::Beam => beam_surrogate(n, seed, BeamMaterial::default()),
        Model::Porous => {
            porous_surrogate(n, seed, PorousMaterial::default(), DuctGeometry::default())
        }
    }
}
