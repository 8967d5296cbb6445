use num_complex::Complex64;

use super::functions::ScalarFunction;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, RealMatrix, RealVector};

/// `A(s) = A0 + s A1 + s^2 A2 + sum_j A_{-j} f_j(s)`.
#[derive(Debug, Clone)]
pub struct SplitFormSystem {
    pub a0: RealMatrix,
    pub a1: RealMatrix,
    pub a2: RealMatrix,
    /// `A_{-1}, ..., A_{-m}`.
    pub aneg: Vec<RealMatrix>,
    /// `f_1, ..., f_m`, as they multiply `A_{-j}`.
    pub functions: Vec<ScalarFunction>,
}

impl SplitFormSystem {
    pub fn new(
        a0: RealMatrix,
        a1: RealMatrix,
        a2: RealMatrix,
        aneg: Vec<RealMatrix>,
        functions: Vec<ScalarFunction>,
    ) -> Result<Self> {
        let n = a0.nrows();
        if n == 0 {
            return Err(Error::Dimension("empty system".into()));
        }
        for (name, m) in [("A0", &a0), ("A1", &a1), ("A2", &a2)]
            .into_iter()
            .chain(aneg.iter().map(|m| ("A_-j", m)))
        {
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "{name} is {:?}, expected {n}x{n}",
                    m.shape()
                )));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        if aneg.len() != functions.len() {
            return Err(Error::Dimension(format!(
                "{} nonlinear matrices but {} functions",
                aneg.len(),
                functions.len()
            )));
        }
        Ok(Self {
            a0,
            a1,
            a2,
            aneg,
            functions,
        })
    }

    pub fn n(&self) -> usize {
        self.a0.nrows()
    }

    pub fn m(&self) -> usize {
        self.aneg.len()
    }

    /// Dense `A(s)`.
    pub fn eval(&self, s: Complex64) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.n(), self.n());
        let terms = [
            (&self.a0, Complex64::new(1.0, 0.0)),
            (&self.a1, s),
            (&self.a2, s * s),
        ];
        for (m, c) in terms {
            out.zip_apply(m, |o, x| *o += c * x);
        }
        for (m, f) in self.aneg.iter().zip(&self.functions) {
            let c = f.eval(s)?;
            out.zip_apply(m, |o, x| *o += c * x);
        }
        Ok(out)
    }

    /// `A(s) v` for a real vector.
    pub fn apply(&self, s: Complex64, v: &RealVector) -> Result<ComplexVector> {
        let mut out = (&self.a0 * v).map(|x| Complex64::new(x, 0.0));
        let a1v = &self.a1 * v;
        let a2v = &self.a2 * v;
        for i in 0..out.len() {
            out[i] += s * a1v[i] + s * s * a2v[i];
        }
        for (m, f) in self.aneg.iter().zip(&self.functions) {
            let c = f.eval(s)?;
            let mv = m * v;
            for i in 0..out.len() {
                out[i] += c * mv[i];
            }
        }
        Ok(out)
    }
}
