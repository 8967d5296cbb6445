//! Fixed-step implicit integration of `-E x' + A x = e1 (x) b(t)`.
//!
//! Each step needs one solve with the shifted pencil `A - s* E` for a fixed
//! real shift `s*`. The block structure gives
//!
//! ```text
//! R(s) w1 = f1 + s A2~ f2 - A^ (K^{-1} (x) I) f3,   K = C0 + s C1
//! w2 = s w1 - f2
//! w3 = (K^{-1} (x) I)(f3 - (c0 + s c1) (x) w1)
//! ```
//!
//! so a step costs one solve with the `n x n` matrix `R(s*)`, factorized once.
//!
//! Backward Euler uses `s* = 1/h`:
//! `(A - E/h) x_{k+1} = b_{k+1} - (E/h) x_k`. Crank-Nicolson solves for the
//! midpoint `y = (x_k + x_{k+1}) / 2` with `s* = 2/h`:
//! `(A - (2/h) E) y = (b_k + b_{k+1}) / 2 - (2/h) E x_k`, then `x_{k+1} = 2y - x_k`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, DenseLu, RealMatrix, RealVector};
use crate::linearize::RealBlockPencil;

/// Growth factor (relative to the initial state) treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    BackwardEuler,
    CrankNicolson,
}

impl Scheme {
    /// Shift `s*` of the matrix `A - s* E` solved in every step.
    pub fn shift(self, h: f64) -> f64 {
        match self {
            Scheme::BackwardEuler => 1.0 / h,
            Scheme::CrankNicolson => 2.0 / h,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "be" | "backward-euler" => Ok(Scheme::BackwardEuler),
            "cn" | "crank-nicolson" => Ok(Scheme::CrankNicolson),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Solves with `A - shift E` for a fixed real shift.
pub trait ShiftedSolve {
    fn shift(&self) -> f64;
    /// Size of the state.
    fn dim(&self) -> usize;
    /// Size of the physical block receiving the forcing.
    fn n(&self) -> usize;
    fn solve(&self, f: &RealVector) -> Result<RealVector>;
    fn apply_e(&self, x: &RealVector) -> RealVector;
}

/// Block solver for a [`RealBlockPencil`].
#[derive(Debug)]
pub struct StructuredSolver<'a> {
    pencil: &'a RealBlockPencil,
    shift: f64,
    k_lu: DenseLu<f64>,
    /// `K^{-1} (c0 + s c1) = -Phi(s)`.
    u: RealVector,
    r_lu: DenseLu<f64>,
}

impl<'a> StructuredSolver<'a> {
    pub fn new(pencil: &'a RealBlockPencil, shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidParameter(format!("shift {shift}")));
        }
        let l = &pencil.lin;
        let k = &l.cc0 + &l.cc1 * shift;
        let k_lu = DenseLu::new(k).map_err(|_| Error::Pole(Complex64::new(shift, 0.0)))?;
        let u = k_lu.solve(&(&l.c0 + &l.c1 * shift))?;
        let mut r = &pencil.a0t + &pencil.a1t * shift + &pencil.a2t * (shift * shift);
        for (blk, uk) in pencil.ahat.iter().zip(u.iter()) {
            r -= blk * *uk;
        }
        let r_lu = DenseLu::new(r).map_err(|e| Error::Singular(format!("R({shift:e}): {e}")))?;
        Ok(Self {
            pencil,
            shift,
            k_lu,
            u,
            r_lu,
        })
    }

    pub fn pencil(&self) -> &RealBlockPencil {
        self.pencil
    }
}

/// Structured solver for the shift used by `scheme` with step `h`.
pub fn ul_factorize(
    pencil: &RealBlockPencil,
    h: f64,
    scheme: Scheme,
) -> Result<StructuredSolver<'_>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step {h} must be positive"
        )));
    }
    StructuredSolver::new(pencil, scheme.shift(h))
}

impl ShiftedSolve for StructuredSolver<'_> {
    fn shift(&self) -> f64 {
        self.shift
    }

    fn dim(&self) -> usize {
        self.pencil.dim()
    }

    fn n(&self) -> usize {
        self.pencil.n
    }

    fn solve(&self, f: &RealVector) -> Result<RealVector> {
        let p = self.pencil;
        if f.len() != p.dim() {
            return Err(Error::Dimension(format!(
                "rhs length {} != {}",
                f.len(),
                p.dim()
            )));
        }
        let s = self.shift;
        let (f1, f2, f3) = p.split(f);
        // G = F3 K^{-T}, i.e. (K^{-1} (x) I) f3 in matrix form
        let mut gt = f3.transpose();
        self.k_lu.solve_mut(&mut gt)?;
        let g = gt.transpose();
        let mut rhs = f1 + &p.a2t * &f2 * s;
        for (k, blk) in p.ahat.iter().enumerate() {
            rhs -= blk * g.column(k);
        }
        let w1 = self.r_lu.solve(&rhs)?;
        let w2 = &w1 * s - f2;
        let w3: RealMatrix = g - &w1 * self.u.transpose();
        Ok(p.join(&w1, &w2, &w3))
    }

    fn apply_e(&self, x: &RealVector) -> RealVector {
        self.pencil.apply_e(x)
    }
}

/// Shifted solves through a dense LU of `A - shift E`.
#[derive(Debug)]
pub struct DenseShiftedSolver {
    e: RealMatrix,
    n: usize,
    shift: f64,
    lu: DenseLu<f64>,
}

impl DenseShiftedSolver {
    /// `n` is the size of the forced block.
    pub fn new(a: &RealMatrix, e: &RealMatrix, n: usize, shift: f64) -> Result<Self> {
        if a.shape() != e.shape() || n > a.nrows() {
            return Err(Error::Dimension(
                "A and E must have equal square shape".into(),
            ));
        }
        let lu = DenseLu::new(a - e * shift)?;
        Ok(Self {
            e: e.clone(),
            n,
            shift,
            lu,
        })
    }

    pub fn from_pencil(pencil: &RealBlockPencil, shift: f64) -> Result<Self> {
        let (a, e) = pencil.to_dense();
        Self::new(&a, &e, pencil.n, shift)
    }
}

impl ShiftedSolve for DenseShiftedSolver {
    fn shift(&self) -> f64 {
        self.shift
    }

    fn dim(&self) -> usize {
        self.e.nrows()
    }

    fn n(&self) -> usize {
        self.n
    }

    fn solve(&self, f: &RealVector) -> Result<RealVector> {
        self.lu.solve(f)
    }

    fn apply_e(&self, x: &RealVector) -> RealVector {
        &self.e * x
    }
}

/// One step from `x_k` at time `t`; `b` maps time to the physical forcing.
pub fn step<S: ShiftedSolve + ?Sized>(
    solver: &S,
    scheme: Scheme,
    h: f64,
    x: &RealVector,
    t: f64,
    b: &dyn Fn(f64) -> RealVector,
) -> Result<RealVector> {
    let shift = scheme.shift(h);
    if (solver.shift() - shift).abs() > 1e-12 * shift.abs() {
        return Err(Error::InvalidParameter(format!(
            "solver shift {:e} does not match {scheme:?} with step {h:e}",
            solver.shift()
        )));
    }
    let n = solver.n();
    let mut rhs = solver.apply_e(x) * (-shift);
    let forcing = match scheme {
        Scheme::BackwardEuler => b(t + h),
        Scheme::CrankNicolson => (b(t) + b(t + h)) * 0.5,
    };
    if forcing.len() != n {
        return Err(Error::Dimension(format!(
            "forcing length {} != {n}",
            forcing.len()
        )));
    }
    let mut head = rhs.rows_mut(0, n);
    head += &forcing;
    let y = solver.solve(&rhs)?;
    Ok(match scheme {
        Scheme::BackwardEuler => y,
        Scheme::CrankNicolson => y * 2.0 - x,
    })
}

/// Recorded trajectory. Norms and errors refer to the physical block `x`
/// (the first `n` entries of the state).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub errors: Option<Vec<f64>>,
    pub states: Option<Vec<RealVector>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_error(&self) -> Option<f64> {
        self.errors
            .as_ref()
            .map(|e| e.iter().copied().fold(0.0, f64::max))
    }

    /// CSV with header `t,norm[,err]` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.len() + 16);
        out.push_str(if self.errors.is_some() {
            "t,norm,err\n"
        } else {
            "t,norm\n"
        });
        for k in 0..self.len() {
            let _ = write!(out, "{:.16e},{:.16e}", self.times[k], self.norms[k]);
            if let Some(e) = &self.errors {
                let _ = write!(out, ",{:.16e}", e[k]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Settings of a fixed-step run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub scheme: Scheme,
    pub h: f64,
    pub steps: usize,
    pub keep_states: bool,
}

/// March `steps` steps from `x0` at `t = 0`, comparing the physical block
/// against `reference` when given.
pub fn simulate<S: ShiftedSolve + ?Sized>(
    solver: &S,
    opts: SimulationOptions,
    x0: &RealVector,
    forcing: &dyn Fn(f64) -> RealVector,
    reference: Option<&dyn Fn(f64) -> RealVector>,
) -> Result<TimeSeries> {
    if x0.len() != solver.dim() {
        return Err(Error::Dimension(format!(
            "initial state length {} != {}",
            x0.len(),
            solver.dim()
        )));
    }
    let n = solver.n();
    let scale = {
        let s = x0.norm();
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };
    let mut ts = TimeSeries {
        errors: reference.map(|_| Vec::with_capacity(opts.steps + 1)),
        states: opts.keep_states.then(|| Vec::with_capacity(opts.steps + 1)),
        ..TimeSeries::default()
    };
    let record = |ts: &mut TimeSeries, t: f64, x: &RealVector| {
        let phys = x.rows(0, n);
        ts.times.push(t);
        ts.norms.push(phys.norm());
        if let (Some(errs), Some(r)) = (ts.errors.as_mut(), reference) {
            errs.push((phys - r(t)).norm());
        }
        if let Some(st) = ts.states.as_mut() {
            st.push(x.clone());
        }
    };
    let mut x = x0.clone();
    record(&mut ts, 0.0, &x);
    for k in 0..opts.steps {
        let t = k as f64 * opts.h;
        x = step(solver, opts.scheme, opts.h, &x, t, forcing)?;
        let nrm = x.norm();
        if !nrm.is_finite() || nrm > DIVERGENCE_FACTOR * scale {
            return Err(Error::Divergence { step: k + 1 });
        }
        record(&mut ts, (k + 1) as f64 * opts.h, &x);
    }
    Ok(ts)
}

/// Complex harmonic solution `Phi(i w) (x) x^` with `R(i w) x^ = b0`.
#[derive(Debug, Clone)]
pub struct HarmonicState {
    pub omega: f64,
    pub state: ComplexVector,
    pub n: usize,
}

impl HarmonicState {
    /// Real initial state.
    pub fn initial(&self) -> RealVector {
        self.state.map(|z| z.re)
    }

    /// Exact full state `Re(state e^{i w t})` under forcing `Re(b0 e^{i w t})`.
    pub fn exact(&self, t: f64) -> RealVector {
        let e = Complex64::from_polar(1.0, self.omega * t);
        self.state.map(|z| (z * e).re)
    }

    /// Physical block of [`Self::exact`].
    pub fn exact_physical(&self, t: f64) -> RealVector {
        let e = Complex64::from_polar(1.0, self.omega * t);
        self.state.rows(0, self.n).map(|z| (z * e).re)
    }
}

fn kron(phi: &ComplexVector, x: &ComplexVector) -> ComplexVector {
    let n = x.len();
    let mut out = ComplexVector::zeros(phi.len() * n);
    for (k, p) in phi.iter().enumerate() {
        out.rows_mut(k * n, n).copy_from(&(x * *p));
    }
    out
}

/// Harmonic state for forcing `Re(b0 e^{i w t})`.
pub fn initial_state_harmonic(
    pencil: &RealBlockPencil,
    omega: f64,
    b0: &RealVector,
) -> Result<HarmonicState> {
    if b0.len() != pencil.n {
        return Err(Error::Dimension(format!(
            "forcing length {} != {}",
            b0.len(),
            pencil.n
        )));
    }
    let s = Complex64::new(0.0, omega);
    let r = pencil.r_matrix(s)?;
    let lu = DenseLu::new(r)
        .map_err(|e| Error::Singular(format!("R(i {omega}) is singular (resonance): {e}")))?;
    let xhat = lu.solve(&b0.map(|x| Complex64::new(x, 0.0)))?;
    let state = kron(&pencil.phi(s)?, &xhat);
    Ok(HarmonicState {
        omega,
        state,
        n: pencil.n,
    })
}

/// State `[x0; 0; Phi(0) (x) x0]` of a system at rest at `x0` for `t <= 0`.
pub fn initial_state_rest(pencil: &RealBlockPencil, x0: &RealVector) -> Result<RealVector> {
    if x0.len() != pencil.n {
        return Err(Error::Dimension(format!(
            "state length {} != {}",
            x0.len(),
            pencil.n
        )));
    }
    let phi = pencil.lin.basis(Complex64::new(0.0, 0.0))?.map(|z| z.re);
    let x1 = x0 * phi.transpose();
    Ok(pencil.join(x0, &RealVector::zeros(pencil.n), &x1))
}

/// State at `t = 0` for a given history `x(t)` on `[-span, 0]`.
///
/// The auxiliary block solves `C0 X1 + C1 X1' = -c0 x - c1 x'` from
/// `X1(-span) = 0`. With `Y = X1 + (C1^{-1} c1) x` the derivative of `x` drops
/// out: `C1 Y' + C0 Y = (C0 C1^{-1} c1 - c0) x`, integrated by Crank-Nicolson in
/// `steps` steps. `x'(0)` is a second-order backward difference.
pub fn initial_state_history(
    pencil: &RealBlockPencil,
    history: &dyn Fn(f64) -> RealVector,
    span: f64,
    steps: usize,
) -> Result<RealVector> {
    if !(span > 0.0) || steps < 2 {
        return Err(Error::InvalidParameter(
            "history needs a positive span and at least 2 steps".into(),
        ));
    }
    let n = pencil.n;
    let l = &pencil.lin;
    let h = span / steps as f64;
    let x_at = |t: f64| -> Result<RealVector> {
        let x = history(t);
        if x.len() != n {
            return Err(Error::Dimension(format!(
                "history length {} != {n}",
                x.len()
            )));
        }
        Ok(x)
    };
    let x0 = x_at(0.0)?;
    let v0 = (x0.clone() * 3.0 - x_at(-h)? * 4.0 + x_at(-2.0 * h)?) / (2.0 * h);
    let d = l.dim();
    if d == 0 {
        return Ok(pencil.join(&x0, &v0, &RealMatrix::zeros(n, 0)));
    }
    let c1_lu = DenseLu::new(l.cc1.clone()).map_err(|_| Error::SingularC1)?;
    let w = c1_lu.solve(&l.c1)?;
    let g = &l.cc0 * &w - &l.c0;
    let lhs = DenseLu::new(&l.cc1 / h + &l.cc0 * 0.5)?;
    let rhs_m = &l.cc1 / h - &l.cc0 * 0.5;
    // Y as d x n
    let mut x_prev = x_at(-span)?;
    let mut y = &w * x_prev.transpose();
    for k in 1..=steps {
        let t = -span + k as f64 * h;
        let x_next = if k == steps { x0.clone() } else { x_at(t)? };
        let mut next = &rhs_m * &y + &g * ((&x_prev + &x_next) * 0.5).transpose();
        lhs.solve_mut(&mut next)?;
        y = next;
        x_prev = x_next;
    }
    let x1 = (y - &w * x0.transpose()).transpose();
    Ok(pencil.join(&x0, &v0, &x1))
}
