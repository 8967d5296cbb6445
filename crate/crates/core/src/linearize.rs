//! Real linearization pencils.
//!
//! A scalar linearization describes rational functions
//! `r_j(s) = alpha0 + s alpha1 + s^2 alpha2 + a_j^T Phi(s)` through a dual basis:
//! `(c0 + s c1) + (C0 + s C1) Phi(s) = 0`, so that `Phi = -(C0 + s C1)^{-1}(c0 + s c1)`.
//! The system pencil `(A, E)` then linearizes
//! `R(s) = A0 + s A1 + s^2 A2 + sum_j r_j(s) A_{-j}`.
//!
//! Bases built from conjugate pairs are first written down with complex
//! rows and columns and then mapped to real ones: a column pair `(phi, conj phi)`
//! becomes `(phi + conj phi, i (phi - conj phi))`, and a row together with its
//! conjugate becomes its real and imaginary parts.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::BarycentricApproximant;
use crate::conj::Node;
use crate::error::{Error, Result};
use crate::linalg::{
    finite_pencil_eigenvalues, numerical_rank_complex, ComplexMatrix, ComplexVector, DenseLu,
    RealMatrix, RealVector,
};
use crate::models::{write_matrix_market, SplitFormSystem};
use crate::refit::{Basis, PoleBasis, PoleBasisKind, RefitApproximant};

/// Imaginary residue accepted (relative to the row size) when a complex row
/// is declared real.
const REALIFY_RTOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowKind {
    /// Real coefficients.
    Real,
    /// The conjugate row is also valid: keep real and imaginary parts.
    Pair,
    /// The conjugate row is the negated row: keep the imaginary part.
    SelfConj,
}

#[derive(Debug, Clone)]
struct ComplexRow {
    constant: Vec<Complex64>,
    linear: Vec<Complex64>,
    kind: RowKind,
}

impl ComplexRow {
    fn new(ncols: usize, kind: RowKind) -> Self {
        Self {
            constant: vec![c(0.0); ncols],
            linear: vec![c(0.0); ncols],
            kind,
        }
    }
}

/// Map complex rows over complex columns to real rows over the real columns.
/// `pair_cols` holds the first column index of each `(phi, conj phi)` pair.
fn realify_rows(
    rows: &[ComplexRow],
    pair_cols: &[usize],
    ncols: usize,
) -> Result<(RealMatrix, RealMatrix)> {
    let i = Complex64::new(0.0, 1.0);
    let nreal: usize = rows
        .iter()
        .map(|r| if r.kind == RowKind::Pair { 2 } else { 1 })
        .sum();
    let mut m0 = RealMatrix::zeros(nreal, ncols);
    let mut m1 = RealMatrix::zeros(nreal, ncols);
    let mut out = 0;
    for row in rows {
        let mut parts = [row.constant.clone(), row.linear.clone()];
        for p in parts.iter_mut() {
            for &u in pair_cols {
                let (x, y) = (p[u], p[u + 1]);
                p[u] = (x + y) / 2.0;
                p[u + 1] = i * (y - x) / 2.0;
            }
        }
        let scale = parts.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = REALIFY_RTOL * scale.max(f64::MIN_POSITIVE);
        for (target, p) in [&mut m0, &mut m1].into_iter().zip(&parts) {
            match row.kind {
                RowKind::Real => {
                    for (k, z) in p.iter().enumerate() {
                        if z.im.abs() > tol {
                            return Err(Error::NotConjugateClosed(format!(
                                "row residue {:.3e}",
                                z.im
                            )));
                        }
                        target[(out, k)] = z.re;
                    }
                }
                RowKind::Pair => {
                    for (k, z) in p.iter().enumerate() {
                        target[(out, k)] = 2.0 * z.re;
                        target[(out + 1, k)] = -2.0 * z.im;
                    }
                }
                RowKind::SelfConj => {
                    for (k, z) in p.iter().enumerate() {
                        if z.re.abs() > tol {
                            return Err(Error::NotConjugateClosed(format!(
                                "row residue {:.3e}",
                                z.re
                            )));
                        }
                        target[(out, k)] = z.im;
                    }
                }
            }
        }
        out += if row.kind == RowKind::Pair { 2 } else { 1 };
    }
    Ok((m0, m1))
}

/// Real dual basis plus coefficient rows for `m` functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarLinearization {
    pub c0: RealVector,
    pub c1: RealVector,
    pub cc0: RealMatrix,
    pub cc1: RealMatrix,
    /// `a_j` per function.
    pub coefficients: Vec<RealVector>,
    /// `[alpha0, alpha1, alpha2]` per function.
    pub alpha: Vec<[f64; 3]>,
}

impl ScalarLinearization {
    fn from_parts(
        m0: RealMatrix,
        m1: RealMatrix,
        coefficients: Vec<RealVector>,
        alpha: Vec<[f64; 3]>,
    ) -> Self {
        let d = m0.ncols() - 1;
        Self {
            c0: m0.column(0).into_owned(),
            c1: m1.column(0).into_owned(),
            cc0: m0.columns(1, d).into_owned(),
            cc1: m1.columns(1, d).into_owned(),
            coefficients,
            alpha,
        }
    }

    /// Size `d~` of the rational basis.
    pub fn dim(&self) -> usize {
        self.c0.len()
    }

    pub fn m(&self) -> usize {
        self.coefficients.len()
    }

    /// `K(s) = C0 + s C1`.
    pub fn k_matrix(&self, s: Complex64) -> ComplexMatrix {
        self.cc0.map(c) + self.cc1.map(|x| s * x)
    }

    /// `k(s) = c0 + s c1`.
    pub fn k_vector(&self, s: Complex64) -> ComplexVector {
        self.c0.map(c) + self.c1.map(|x| s * x)
    }

    /// The rational basis `Phi(s) = -(C0 + s C1)^{-1} (c0 + s c1)`.
    pub fn basis(&self, s: Complex64) -> Result<ComplexVector> {
        if self.dim() == 0 {
            return Ok(ComplexVector::zeros(0));
        }
        let lu = DenseLu::new(self.k_matrix(s)).map_err(|_| Error::Pole(s))?;
        Ok(-lu.solve(&self.k_vector(s))?)
    }

    /// Schur complement `alpha(s) - a_j^T (C0 + s C1)^{-1} (c0 + s c1)`.
    pub fn eval(&self, j: usize, s: Complex64) -> Result<Complex64> {
        if j >= self.m() {
            return Err(Error::Dimension(format!("function index {j} out of range")));
        }
        let phi = self.basis(s)?;
        Ok(self.eval_with_basis(j, s, &phi))
    }

    pub(crate) fn eval_with_basis(&self, j: usize, s: Complex64, phi: &ComplexVector) -> Complex64 {
        let [a0, a1, a2] = self.alpha[j];
        let mut out = c(a0) + s * a1 + s * s * a2;
        for (a, p) in self.coefficients[j].iter().zip(phi.iter()) {
            out += p * *a;
        }
        out
    }

    /// Finite eigenvalues of `C0 + s C1`: the poles of the basis.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        finite_pencil_eigenvalues(&self.cc0, &self.cc1)
    }

    /// Rank of `[c0 + s c1 | C0 + s C1]`, or of `[c1 | C1]` for `s = None` (infinity).
    pub fn dual_basis_rank(&self, s: Option<Complex64>) -> Result<usize> {
        let d = self.dim();
        if d == 0 {
            return Ok(0);
        }
        let mut m = ComplexMatrix::zeros(d, d + 1);
        let (v, k) = match s {
            Some(s) => (self.k_vector(s), self.k_matrix(s)),
            None => (self.c1.map(c), self.cc1.map(c)),
        };
        m.set_column(0, &v);
        m.columns_mut(1, d).copy_from(&k);
        numerical_rank_complex(&m)
    }

    /// Replace function `j` by `s r_j(s)`, using `s C1 Phi = -c0 - s c1 - C0 Phi`.
    /// Requires `alpha2 = 0` and a nonsingular `C1`.
    pub fn multiply_by_s(&mut self, j: usize) -> Result<()> {
        if j >= self.m() {
            return Err(Error::Dimension(format!("function index {j} out of range")));
        }
        let [a0, a1, a2] = self.alpha[j];
        if a2 != 0.0 {
            return Err(Error::DegreeOverflow);
        }
        let y = if self.dim() == 0 {
            RealVector::zeros(0)
        } else {
            let lu = DenseLu::new(self.cc1.transpose()).map_err(|_| Error::SingularC1)?;
            lu.solve(&self.coefficients[j])?
        };
        self.alpha[j] = [-y.dot(&self.c0), a0 - y.dot(&self.c1), a1];
        self.coefficients[j] = -(self.cc0.transpose() * y);
        Ok(())
    }
}

/// Linearization of a barycentric approximant.
pub fn strong_barycentric_linearization(r: &BarycentricApproximant) -> Result<ScalarLinearization> {
    scalar_linearization(&RefitApproximant::from_barycentric(r))
}

/// Linearization of any refit.
pub fn scalar_linearization(r: &RefitApproximant) -> Result<ScalarLinearization> {
    match &r.basis {
        Basis::Barycentric { support, weights } => {
            barycentric_pencil(support, weights, &r.coefficients, &r.alpha)
        }
        Basis::Poles(p) => match p.kind {
            PoleBasisKind::PartialFraction => {
                partial_fraction_linearization(p, &r.coefficients, &r.alpha)
            }
            PoleBasisKind::InverseNewton => {
                inverse_newton_linearization(p, &r.coefficients, &r.alpha)
            }
        },
    }
}

fn check_coefficients(len: usize, coefficients: &[Vec<f64>], alpha: &[[f64; 3]]) -> Result<()> {
    if coefficients.len() != alpha.len() || coefficients.iter().any(|a| a.len() != len) {
        return Err(Error::Dimension(format!(
            "coefficient rows must have length {len}"
        )));
    }
    Ok(())
}

/// Column positions of the nodes when the column list starts at `offset`.
fn column_layout(nodes: &[Node], offset: usize) -> (Vec<usize>, Vec<usize>) {
    let mut starts = Vec::with_capacity(nodes.len());
    let mut pairs = Vec::new();
    let mut k = offset;
    for n in nodes {
        starts.push(k);
        if n.is_pair() {
            pairs.push(k);
        }
        k += n.multiplicity();
    }
    (starts, pairs)
}

fn check_distinct(nodes: &[Node]) -> Result<()> {
    let pts = crate::conj::expand(nodes);
    for (i, a) in pts.iter().enumerate() {
        if pts[i + 1..].iter().any(|b| b == a) {
            return Err(Error::Duplicate(*a));
        }
    }
    Ok(())
}

/// Dual basis rows `xi_i * 1 + (mu_i - s) phi_i`.
pub fn partial_fraction_linearization(
    basis: &PoleBasis,
    coefficients: &[Vec<f64>],
    alpha: &[[f64; 3]],
) -> Result<ScalarLinearization> {
    check_distinct(&basis.poles)?;
    let d = basis.len();
    check_coefficients(d, coefficients, alpha)?;
    let (starts, pairs) = column_layout(&basis.poles, 1);
    let rows: Vec<ComplexRow> = basis
        .poles
        .iter()
        .zip(&starts)
        .zip(&basis.log_xi)
        .map(|((p, &k), l)| {
            let mut row = ComplexRow::new(
                d + 1,
                if p.is_pair() {
                    RowKind::Pair
                } else {
                    RowKind::Real
                },
            );
            row.constant[0] = c(l.exp());
            row.constant[k] = p.value();
            row.linear[k] = c(-1.0);
            row
        })
        .collect();
    let (m0, m1) = realify_rows(&rows, &pairs, d + 1)?;
    let coefficients = coefficients
        .iter()
        .map(|a| RealVector::from_column_slice(a))
        .collect();
    Ok(ScalarLinearization::from_parts(
        m0,
        m1,
        coefficients,
        alpha.to_vec(),
    ))
}

/// Dual basis rows `(xi_i / xi_{i-1}) phi_{i-1} + (mu_i - s) phi_i` along the
/// chain of running products; `phi_0 = 1`.
pub fn inverse_newton_linearization(
    basis: &PoleBasis,
    coefficients: &[Vec<f64>],
    alpha: &[[f64; 3]],
) -> Result<ScalarLinearization> {
    check_distinct(&basis.poles)?;
    let d = basis.len();
    check_coefficients(d, coefficients, alpha)?;
    let (starts, pairs) = column_layout(&basis.poles, 1);
    let mut rows = Vec::with_capacity(basis.poles.len());
    let mut parent = 0;
    let mut parent_log = 0.0;
    for ((p, &k), l) in basis.poles.iter().zip(&starts).zip(&basis.log_xi) {
        let mut row = ComplexRow::new(
            d + 1,
            if p.is_pair() {
                RowKind::Pair
            } else {
                RowKind::Real
            },
        );
        row.constant[parent] = c((l - parent_log).exp());
        row.constant[k] = p.value();
        row.linear[k] = c(-1.0);
        rows.push(row);
        parent = k;
        parent_log = *l;
    }
    let (m0, m1) = realify_rows(&rows, &pairs, d + 1)?;
    let coefficients = coefficients
        .iter()
        .map(|a| RealVector::from_column_slice(a))
        .collect();
    Ok(ScalarLinearization::from_parts(
        m0,
        m1,
        coefficients,
        alpha.to_vec(),
    ))
}

/// Strong barycentric pencil of size `d - 1`.
///
/// With `phi_k = (xi_k / (s - sigma_k)) / sum_i xi_i / (s - sigma_i)` every pair
/// satisfies `xi_l (s - sigma_k) phi_k - xi_k (s - sigma_l) phi_l = 0`. Supports are
/// ordered real first, then pairs; consecutive supports are linked by such
/// rows and, without real supports, the last pair is linked to its own
/// conjugate. The identity `sum_k phi_k = 1` then eliminates the last basis
/// function in favour of the constant.
fn barycentric_pencil(
    support: &[Node],
    weights: &[Complex64],
    coefficients: &[Vec<f64>],
    alpha: &[[f64; 3]],
) -> Result<ScalarLinearization> {
    check_distinct(support)?;
    if support.is_empty() || weights.len() != support.len() {
        return Err(Error::Dimension(
            "support and weights must have equal nonzero length".into(),
        ));
    }
    let d = crate::conj::count(support);
    check_coefficients(d, coefficients, alpha)?;

    // reals first, stable within each group
    let mut order: Vec<usize> = (0..support.len())
        .filter(|&k| !support[k].is_pair())
        .collect();
    let nreal = order.len();
    order.extend((0..support.len()).filter(|&k| support[k].is_pair()));
    let nodes: Vec<Node> = order.iter().map(|&k| support[k]).collect();
    let xi: Vec<Complex64> = order.iter().map(|&k| weights[k]).collect();
    let (old_starts, _) = column_layout(support, 0);
    let (starts, pairs) = column_layout(&nodes, 0);

    // column map new -> old for the real coefficient vectors
    let mut perm = vec![0; d];
    for (pos, &k) in order.iter().enumerate() {
        for t in 0..support[k].multiplicity() {
            perm[starts[pos] + t] = old_starts[k] + t;
        }
    }

    let link =
        |p: usize, xp: Complex64, sp: Complex64, q: usize, xq: Complex64, sq: Complex64, kind| {
            let mut row = ComplexRow::new(d, kind);
            row.constant[p] = -xq * sp;
            row.linear[p] = xq;
            row.constant[q] = xp * sq;
            row.linear[q] = -xp;
            row
        };
    let mut rows = Vec::with_capacity(d);
    for w in 0..nodes.len().saturating_sub(1) {
        let (a, b) = (w, w + 1);
        let kind = if nodes[b].is_pair() {
            RowKind::Pair
        } else {
            RowKind::Real
        };
        rows.push(link(
            starts[a],
            xi[a],
            nodes[a].value(),
            starts[b],
            xi[b],
            nodes[b].value(),
            kind,
        ));
    }
    if nreal == 0 {
        let last = nodes.len() - 1;
        let (x, z) = (xi[last], nodes[last].value());
        rows.push(link(
            starts[last],
            x,
            z,
            starts[last] + 1,
            x.conj(),
            z.conj(),
            RowKind::SelfConj,
        ));
    }
    let (m0, m1) = realify_rows(&rows, &pairs, d)?;
    debug_assert_eq!(m0.nrows(), d - 1);

    // eliminate q: the first member of the last pair, or the last real support
    let q = if nodes.len() > nreal {
        starts[nodes.len() - 1]
    } else {
        d - 1
    };
    let mut ones = vec![0.0; d];
    for &k in &starts {
        ones[k] = 1.0;
    }
    let keep: Vec<usize> = (0..d).filter(|&k| k != q).collect();
    let mut r0 = RealMatrix::zeros(d - 1, d);
    let mut r1 = RealMatrix::zeros(d - 1, d);
    r0.set_column(0, &m0.column(q));
    r1.set_column(0, &m1.column(q));
    for (t, &k) in keep.iter().enumerate() {
        r0.set_column(t + 1, &(m0.column(k) - m0.column(q) * ones[k]));
        r1.set_column(t + 1, &(m1.column(k) - m1.column(q) * ones[k]));
    }

    let mut new_alpha = alpha.to_vec();
    let mut new_coeffs = Vec::with_capacity(coefficients.len());
    for (b_old, al) in coefficients.iter().zip(new_alpha.iter_mut()) {
        let b: Vec<f64> = perm.iter().map(|&o| b_old[o]).collect();
        al[0] += b[q];
        new_coeffs.push(RealVector::from_iterator(
            d - 1,
            keep.iter().map(|&k| b[k] - b[q] * ones[k]),
        ));
    }
    Ok(ScalarLinearization::from_parts(
        r0, r1, new_coeffs, new_alpha,
    ))
}

/// `(A, E)` of the system linearization in block form:
///
/// ```text
/// A - sE = [ A0~ + s A1~   s A2~   A^        ]
///          [ s I           -I      0         ]
///          [ (c0+s c1)(x)I  0      (C0+sC1)(x)I ]
/// ```
///
/// with `A^ = sum_j a_j^T (x) A_{-j}` and `Ak~ = Ak + sum_j alpha_k^(j) A_{-j}`.
/// States are ordered `[x; x'; Phi (x) x]`.
#[derive(Debug, Clone)]
pub struct RealBlockPencil {
    pub n: usize,
    pub a0t: RealMatrix,
    pub a1t: RealMatrix,
    pub a2t: RealMatrix,
    pub aneg: Vec<RealMatrix>,
    /// Block `k` of `A^`: `sum_j a_j[k] A_{-j}`.
    pub ahat: Vec<RealMatrix>,
    pub lin: ScalarLinearization,
}

/// Build the system pencil.
pub fn assemble_system_pencil(
    system: &SplitFormSystem,
    lin: &ScalarLinearization,
) -> Result<RealBlockPencil> {
    if lin.m() != system.m() {
        return Err(Error::Dimension(format!(
            "linearization has {} functions, system {}",
            lin.m(),
            system.m()
        )));
    }
    let n = system.n();
    let mut a = [system.a0.clone(), system.a1.clone(), system.a2.clone()];
    for (al, an) in lin.alpha.iter().zip(&system.aneg) {
        for k in 0..3 {
            if al[k] != 0.0 {
                a[k] += an * al[k];
            }
        }
    }
    let ahat = (0..lin.dim())
        .map(|k| {
            let mut blk = RealMatrix::zeros(n, n);
            for (aj, an) in lin.coefficients.iter().zip(&system.aneg) {
                if aj[k] != 0.0 {
                    blk += an * aj[k];
                }
            }
            blk
        })
        .collect();
    let [a0t, a1t, a2t] = a;
    Ok(RealBlockPencil {
        n,
        a0t,
        a1t,
        a2t,
        aneg: system.aneg.clone(),
        ahat,
        lin: lin.clone(),
    })
}

/// Metadata written next to the exported pencil.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilManifest {
    pub n: usize,
    pub basis_dim: usize,
    pub m: usize,
    pub a: String,
    pub e: String,
    pub c0: Vec<f64>,
    pub c1: Vec<f64>,
    /// Row-major.
    pub cc0: Vec<Vec<f64>>,
    pub cc1: Vec<Vec<f64>>,
    pub coefficients: Vec<Vec<f64>>,
    pub alpha: Vec<[f64; 3]>,
}

fn rows_of(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl RealBlockPencil {
    /// Basis dimension `d~`.
    pub fn basis_dim(&self) -> usize {
        self.lin.dim()
    }

    pub fn m(&self) -> usize {
        self.lin.m()
    }

    /// Total state dimension `n (2 + d~)`.
    pub fn dim(&self) -> usize {
        self.n * (2 + self.basis_dim())
    }

    /// Dense `(A, E)`.
    pub fn to_dense(&self) -> (RealMatrix, RealMatrix) {
        let n = self.n;
        let d = self.basis_dim();
        let size = self.dim();
        let mut a = RealMatrix::zeros(size, size);
        let mut e = RealMatrix::zeros(size, size);
        a.view_mut((0, 0), (n, n)).copy_from(&self.a0t);
        e.view_mut((0, 0), (n, n)).copy_from(&(-&self.a1t));
        e.view_mut((0, n), (n, n)).copy_from(&(-&self.a2t));
        for (k, blk) in self.ahat.iter().enumerate() {
            a.view_mut((0, (2 + k) * n), (n, n)).copy_from(blk);
        }
        for i in 0..n {
            a[(n + i, n + i)] = -1.0;
            e[(n + i, i)] = -1.0;
        }
        let l = &self.lin;
        for r in 0..d {
            let row = (2 + r) * n;
            for i in 0..n {
                a[(row + i, i)] = l.c0[r];
                e[(row + i, i)] = -l.c1[r];
                for k in 0..d {
                    a[(row + i, (2 + k) * n + i)] = l.cc0[(r, k)];
                    e[(row + i, (2 + k) * n + i)] = -l.cc1[(r, k)];
                }
            }
        }
        (a, e)
    }

    /// `Phi(s) = [1, s, Phi~(s)]`.
    pub fn phi(&self, s: Complex64) -> Result<ComplexVector> {
        let b = self.lin.basis(s)?;
        let mut out = ComplexVector::zeros(2 + b.len());
        out[0] = c(1.0);
        out[1] = s;
        out.rows_mut(2, b.len()).copy_from(&b);
        Ok(out)
    }

    /// `R(s) = A0~ + s A1~ + s^2 A2~ + sum_j a_j^T Phi~(s) A_{-j}`.
    pub fn r_matrix(&self, s: Complex64) -> Result<ComplexMatrix> {
        let phi = self.lin.basis(s)?;
        let mut r = self.a0t.map(c) + self.a1t.map(|x| s * x) + self.a2t.map(|x| s * s * x);
        for (k, blk) in self.ahat.iter().enumerate() {
            let p = phi[k];
            r += blk.map(|x| p * x);
        }
        Ok(r)
    }

    /// Split a state into `(x, x', X1)` with `X1` an `n x d~` matrix whose column `k` is block `k`.
    pub fn split(&self, x: &RealVector) -> (RealVector, RealVector, RealMatrix) {
        let n = self.n;
        let d = self.basis_dim();
        (
            x.rows(0, n).into_owned(),
            x.rows(n, n).into_owned(),
            RealMatrix::from_column_slice(n, d, &x.as_slice()[2 * n..]),
        )
    }

    pub fn join(&self, x: &RealVector, v: &RealVector, x1: &RealMatrix) -> RealVector {
        let mut out = RealVector::zeros(self.dim());
        let n = self.n;
        out.rows_mut(0, n).copy_from(x);
        out.rows_mut(n, n).copy_from(v);
        out.rows_mut(2 * n, x1.len()).copy_from_slice(x1.as_slice());
        out
    }

    /// `A x` without forming `A`.
    pub fn apply_a(&self, x: &RealVector) -> RealVector {
        let (x0, v, x1) = self.split(x);
        let mut top = &self.a0t * &x0;
        for (k, blk) in self.ahat.iter().enumerate() {
            top += blk * x1.column(k);
        }
        let l = &self.lin;
        let bottom = &x0 * l.c0.transpose() + &x1 * l.cc0.transpose();
        self.join(&top, &(-v), &bottom)
    }

    /// `E x` without forming `E`.
    pub fn apply_e(&self, x: &RealVector) -> RealVector {
        let (x0, v, x1) = self.split(x);
        let top = -(&self.a1t * &x0) - &self.a2t * &v;
        let l = &self.lin;
        let bottom = -(&x0 * l.c1.transpose()) - &x1 * l.cc1.transpose();
        self.join(&top, &(-x0), &bottom)
    }

    /// Largest imaginary part stored in the pencil: always zero since all
    /// matrices are real-typed; kept for reporting.
    pub fn max_imaginary(&self) -> f64 {
        0.0
    }

    pub fn manifest(&self) -> PencilManifest {
        let l = &self.lin;
        PencilManifest {
            n: self.n,
            basis_dim: self.basis_dim(),
            m: self.m(),
            a: "A.mtx".into(),
            e: "E.mtx".into(),
            c0: l.c0.iter().copied().collect(),
            c1: l.c1.iter().copied().collect(),
            cc0: rows_of(&l.cc0),
            cc1: rows_of(&l.cc1),
            coefficients: l
                .coefficients
                .iter()
                .map(|a| a.iter().copied().collect())
                .collect(),
            alpha: l.alpha.clone(),
        }
    }

    /// Write `A.mtx`, `E.mtx` and `pencil.json` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let (a, e) = self.to_dense();
        write_matrix_market(&dir.join("A.mtx"), &a)?;
        write_matrix_market(&dir.join("E.mtx"), &e)?;
        fs::write(
            dir.join("pencil.json"),
            serde_json::to_string_pretty(&self.manifest())?,
        )?;
        Ok(())
    }
}
