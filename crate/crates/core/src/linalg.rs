//! Dense kernels used by the approximation, linearization and time stepping code.
//!
//! Matrices are `nalgebra` dense matrices and therefore column-major. All sizes
//! handled here are small (at most a few hundred columns, possibly many rows for
//! least-squares problems on sample grids).

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealVector = DVector<f64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative threshold below which a singular value counts as zero.
pub const SINGULAR_RTOL: f64 = 1e-13;

/// Smallest singular triplet of a tall matrix.
#[derive(Debug, Clone)]
pub struct SingularPair {
    /// Unit right singular vector.
    pub right: RealVector,
    /// Unit left singular vector, `M v = value * left`.
    pub left: RealVector,
    pub value: f64,
    /// Largest singular value, useful for relative tests.
    pub largest: f64,
}

/// Thin SVD computed through a QR factorization first. For the tall Loewner
/// and least-squares matrices of this crate this is noticeably cheaper than a
/// direct bidiagonalization and just as accurate.
struct TallSvd {
    qr: nalgebra::QR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    u: RealMatrix,
    sv: RealVector,
    v_t: RealMatrix,
}

impl TallSvd {
    fn new(m: &RealMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if rows < cols {
            return Err(Error::Dimension(format!(
                "need at least as many rows as columns, got {rows}x{cols}"
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix has non-finite entries".into(),
            ));
        }
        let qr = m.clone().qr();
        let r = qr.r();
        let svd = r.svd(true, true);
        let u = svd.u.ok_or(Error::NoConvergence)?;
        let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
        Ok(Self {
            qr,
            u,
            sv: svd.singular_values,
            v_t,
        })
    }

    fn largest(&self) -> f64 {
        self.sv.iter().cloned().fold(0.0, f64::max)
    }

    fn argmin(&self) -> usize {
        self.sv.argmin().0
    }
}

/// Unit right singular vector for the smallest singular value of `m`.
pub fn smallest_right_singular_vector(m: &RealMatrix) -> Result<SingularPair> {
    let svd = TallSvd::new(m)?;
    let k = svd.argmin();
    let right = svd.v_t.row(k).transpose();
    let left_r = svd.u.column(k).into_owned();
    let left = svd.qr.q() * left_r;
    Ok(SingularPair {
        right,
        left,
        value: svd.sv[k],
        largest: svd.largest(),
    })
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
    }
    let mut sv: Vec<f64> = if rows >= cols {
        TallSvd::new(m)?.sv.iter().cloned().collect()
    } else {
        TallSvd::new(&m.transpose())?.sv.iter().cloned().collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Numerical rank with the crate-wide relative threshold.
pub fn numerical_rank(m: &RealMatrix) -> Result<usize> {
    let sv = singular_values(m)?;
    let tol = SINGULAR_RTOL * sv[0].max(f64::MIN_POSITIVE);
    Ok(sv.iter().filter(|&&x| x > tol).count())
}

/// Numerical rank of a complex matrix, via its real embedding `[[Re, -Im], [Im, Re]]`
/// whose rank is twice the complex rank.
pub fn numerical_rank_complex(m: &ComplexMatrix) -> Result<usize> {
    let (r, c) = m.shape();
    let mut emb = RealMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            emb[(i, j)] = z.re;
            emb[(i, j + c)] = -z.im;
            emb[(i + r, j)] = z.im;
            emb[(i + r, j + c)] = z.re;
        }
    }
    Ok(numerical_rank(&emb)? / 2)
}

/// Result of a least-squares solve.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// One column per right-hand side.
    pub solution: RealMatrix,
    /// 2-norm of the residual, per right-hand side.
    pub residual: Vec<f64>,
    /// Set when singular values below the threshold were discarded and the
    /// minimum-norm solution was returned.
    pub rank_deficient: bool,
    /// Ratio of the largest to smallest singular value.
    pub condition: f64,
}

/// Least-squares solve for several right-hand sides sharing one matrix.
pub fn least_squares_solve_many(m: &RealMatrix, rhs: &RealMatrix) -> Result<LeastSquares> {
    if m.nrows() != rhs.nrows() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows, right-hand side {}",
            m.nrows(),
            rhs.nrows()
        )));
    }
    let svd = TallSvd::new(m)?;
    let cols = m.ncols();
    let largest = svd.largest();
    let tol = SINGULAR_RTOL * largest;
    let smallest = svd.sv.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut qtb = rhs.clone();
    svd.qr.q_tr_mul(&mut qtb);
    let head = qtb.rows(0, cols).into_owned();

    // x = V * diag(1/s) * U^T * Q^T b, dropping tiny singular values
    let mut coeff = svd.u.transpose() * head;
    let mut rank_deficient = false;
    for (k, s) in svd.sv.iter().enumerate() {
        if *s > tol {
            coeff.row_mut(k).scale_mut(1.0 / s);
        } else {
            rank_deficient = true;
            coeff.row_mut(k).fill(0.0);
        }
    }
    let solution = svd.v_t.transpose() * coeff;
    let resid = m * &solution - rhs;
    let residual = resid.column_iter().map(|c| c.norm()).collect();
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    Ok(LeastSquares {
        solution,
        residual,
        rank_deficient,
        condition,
    })
}

/// Minimizer of `|m x - rhs|_2`.
pub fn least_squares_solve(m: &RealMatrix, rhs: &RealVector) -> Result<LeastSquares> {
    let b = RealMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
    least_squares_solve_many(m, &b)
}

/// LU factorization with partial pivoting, kept for repeated solves.
#[derive(Debug, Clone)]
pub struct DenseLu<T: ComplexField> {
    lu: nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl<T: ComplexField<RealField = f64>> DenseLu<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {r}x{c}"
            )));
        }
        if r == 0 {
            return Ok(Self { lu: m.lu(), n: 0 });
        }
        let lu = m.lu();
        let u = lu.u();
        let mut umax = 0.0f64;
        let mut umin = f64::INFINITY;
        for k in 0..r {
            let a = u[(k, k)].clone().modulus();
            umax = umax.max(a);
            umin = umin.min(a);
        }
        if !(umin > (r as f64) * f64::EPSILON * umax) || !umax.is_finite() {
            return Err(Error::Singular(format!("pivot ratio {:.3e}", umin / umax)));
        }
        Ok(Self { lu, n: r })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &DVector<T>) -> Result<DVector<T>> {
        if rhs.len() != self.n {
            return Err(Error::Dimension(format!(
                "rhs length {} != {}",
                rhs.len(),
                self.n
            )));
        }
        if self.n == 0 {
            return Ok(rhs.clone());
        }
        self.lu
            .solve(rhs)
            .ok_or_else(|| Error::Singular("zero pivot".into()))
    }

    pub fn solve_mut(&self, rhs: &mut DMatrix<T>) -> Result<()> {
        if self.n == 0 {
            return Ok(());
        }
        if self.lu.solve_mut(rhs) {
            Ok(())
        } else {
            Err(Error::Singular("zero pivot".into()))
        }
    }
}

/// Solve `m x = rhs` with a fresh LU factorization.
pub fn dense_lu_solve<T: ComplexField<RealField = f64>>(
    m: &DMatrix<T>,
    rhs: &DVector<T>,
) -> Result<DVector<T>> {
    DenseLu::new(m.clone())?.solve(rhs)
}

/// Eigenvalue of a matrix pencil; pencils with singular `C1` have eigenvalues at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PencilEigenvalue {
    Finite(Complex64),
    Infinite,
}

impl PencilEigenvalue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            PencilEigenvalue::Finite(z) => Some(z),
            PencilEigenvalue::Infinite => None,
        }
    }
}

/// Eigenvalues of a general real square matrix.
pub fn eigenvalues(m: &RealMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = balance(m);
    let f = faer::Mat::<f64>::from_fn(n, n, |i, j| b[(i, j)]);
    let ev = f.eigenvalues().map_err(|_| Error::NoConvergence)?;
    Ok(ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

/// Diagonal similarity by powers of two that equalizes row and column norms
/// (Parlett-Reinsch balancing); eigenvalues are unchanged, exactly.
fn balance(m: &RealMatrix) -> RealMatrix {
    let n = m.nrows();
    let mut b = m.clone();
    let radix = 2.0f64;
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if cc + rr < 0.95 * total {
                done = false;
                b.row_mut(i).scale_mut(1.0 / f);
                b.column_mut(i).scale_mut(f);
            }
        }
        if done {
            break;
        }
    }
    b
}

fn pivot_ratio(m: &RealMatrix) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let mut umax = 0.0f64;
    let mut umin = f64::INFINITY;
    for k in 0..n {
        umax = umax.max(u[(k, k)].abs());
        umin = umin.min(u[(k, k)].abs());
    }
    if umax == 0.0 {
        0.0
    } else {
        umin / umax
    }
}

/// All `s` with `det(C0 + s C1) = 0`, counted with multiplicity.
///
/// A well-conditioned `C1` is handled as the standard problem `-C1^{-1} C0`;
/// otherwise a real shift `t` with `C0 + t C1` invertible is used and the
/// eigenvalues `nu` of `(C0 + t C1)^{-1} C1` map to `s = t - 1/nu`, with
/// `nu = 0` reported as an infinite eigenvalue.
pub fn pencil_eigenvalues(c0: &RealMatrix, c1: &RealMatrix) -> Result<Vec<PencilEigenvalue>> {
    let n = c0.nrows();
    if c0.shape() != (n, n) || c1.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "pencil blocks {:?} and {:?} must be equal and square",
            c0.shape(),
            c1.shape()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let n0 = c0.norm();
    let n1 = c1.norm();
    if n1 == 0.0 {
        if pivot_ratio(c0) > 1e-14 {
            return Ok(vec![PencilEigenvalue::Infinite; n]);
        }
        return Err(Error::SingularPencil);
    }
    // work with unit-norm blocks; s = scale * s'
    let a = if n0 > 0.0 { c0 / n0 } else { c0.clone() };
    let b = c1 / n1;
    let scale = if n0 > 0.0 { n0 / n1 } else { 1.0 };

    if pivot_ratio(&b) > 1e-11 {
        let lu = DenseLu::new(b)?;
        let mut m = a;
        lu.solve_mut(&mut m)?;
        let ev = eigenvalues(&(-m))?;
        return Ok(ev
            .into_iter()
            .map(|z| PencilEigenvalue::Finite(z * scale))
            .collect());
    }

    let shifts = [0.0, 1.0, -1.0, 0.5, -2.0, 3.7, -0.3, 10.0, -10.0, 0.137];
    let mut best: Option<(f64, f64)> = None;
    for &t in &shifts {
        let r = pivot_ratio(&(&a + &b * t));
        if best.is_none_or(|(_, br)| r > br) {
            best = Some((t, r));
        }
    }
    let (t, ratio) = best.expect("shift list is not empty");
    if ratio < 1e-13 {
        return Err(Error::SingularPencil);
    }
    let lu = DenseLu::new(&a + &b * t)?;
    let mut nmat = b;
    lu.solve_mut(&mut nmat)?;
    let nnorm = nmat.norm();
    let ev = eigenvalues(&nmat)?;
    Ok(ev
        .into_iter()
        .map(|nu| {
            if nu.norm() <= 1e-10 * nnorm {
                PencilEigenvalue::Infinite
            } else {
                PencilEigenvalue::Finite((Complex64::new(t, 0.0) - nu.inv()) * scale)
            }
        })
        .collect())
}

/// Finite eigenvalues only.
pub fn finite_pencil_eigenvalues(c0: &RealMatrix, c1: &RealMatrix) -> Result<Vec<Complex64>> {
    Ok(pencil_eigenvalues(c0, c1)?
        .into_iter()
        .filter_map(PencilEigenvalue::finite)
        .collect())
}

/// Convert a real matrix to complex.
pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Spectral norm via the largest singular value.
pub fn norm2(m: &RealMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).map(|s| s[0]).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    /// One-sided Jacobi SVD, used only as an independent oracle.
    fn jacobi_singular_values(m: &RealMatrix) -> Vec<f64> {
        let mut a = m.clone();
        let n = a.ncols();
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha: f64 = a.column(p).norm_squared();
                    let beta: f64 = a.column(q).norm_squared();
                    let gamma: f64 = a.column(p).dot(&a.column(q));
                    if gamma.abs() <= 1e-300 {
                        continue;
                    }
                    off = off.max(gamma.abs() / (alpha * beta).sqrt());
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..a.nrows() {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        a[(i, p)] = c * x - s * y;
                        a[(i, q)] = s * x + c * y;
                    }
                }
            }
            if off < 1e-15 {
                break;
            }
        }
        let mut sv: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    #[test]
    fn identity_smallest_singular_value() {
        let p = smallest_right_singular_vector(&RealMatrix::identity(2, 2)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-15);
        assert!((p.right.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_with_zero_row() {
        let m = RealMatrix::from_row_slice(3, 2, &[3.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        let p = smallest_right_singular_vector(&m).unwrap();
        assert!((p.value - 0.5).abs() < 1e-15);
        assert!(p.right[0].abs() < 1e-15);
        assert!((p.right[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_smallest_singular_value_matches_jacobi() {
        let m = random(10, 4, 7);
        let p = smallest_right_singular_vector(&m).unwrap();
        let oracle = jacobi_singular_values(&m);
        let smin = *oracle.last().unwrap();
        assert!(
            (p.value - smin).abs() <= 1e-12 * oracle[0],
            "{} vs {}",
            p.value,
            smin
        );
        let resid = (&m * &p.right).norm();
        assert!((resid - smin).abs() <= 1e-12 * oracle[0]);
        let pair = &m * &p.right - &p.left * p.value;
        assert!(pair.norm() <= 1e-12 * oracle[0]);
    }

    #[test]
    fn empty_matrix_is_rejected() {
        assert!(matches!(
            smallest_right_singular_vector(&RealMatrix::zeros(0, 0)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            smallest_right_singular_vector(&RealMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn diagonal_pencil() {
        let c0 = -RealMatrix::from_diagonal(&RealVector::from_vec(vec![1.0, 2.0]));
        let c1 = RealMatrix::identity(2, 2);
        let mut ev = finite_pencil_eigenvalues(&c0, &c1).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_pencil() {
        let c0 = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let c1 = RealMatrix::identity(2, 2);
        let mut ev = finite_pencil_eigenvalues(&c0, &c1).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_c1_reports_infinite_eigenvalue() {
        // det(C0 + s C1) = (s - 1) * 1 with C1 = diag(1, 0)
        let c0 = RealMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let c1 = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let ev = pencil_eigenvalues(&c0, &c1).unwrap();
        assert_eq!(
            ev.iter()
                .filter(|e| **e == PencilEigenvalue::Infinite)
                .count(),
            1
        );
        let fin: Vec<_> = ev.iter().filter_map(|e| e.finite()).collect();
        assert_eq!(fin.len(), 1);
        assert!((fin[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_pencil_is_rejected() {
        let c0 = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let c1 = RealMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            pencil_eigenvalues(&c0, &c1),
            Err(Error::SingularPencil)
        ));
    }

    #[test]
    fn pencil_matches_standard_problem_on_random_instances() {
        for seed in 0..10 {
            let c0 = random(8, 8, 100 + seed);
            let c1 = random(8, 8, 200 + seed) + RealMatrix::identity(8, 8) * 3.0;
            let ev = finite_pencil_eigenvalues(&c0, &c1).unwrap();
            let inv = c1.clone().try_inverse().unwrap();
            let reference = eigenvalues(&(-(inv * &c0))).unwrap();
            for z in &reference {
                let best = ev
                    .iter()
                    .map(|e| (e - z).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    best <= 1e-10 * z.norm().max(1.0),
                    "seed {seed}: {z} missing ({best:e})"
                );
            }
            // conjugate closure of a real pencil
            for z in &ev {
                let best = ev
                    .iter()
                    .map(|e| (e - z.conj()).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= 1e-10 * z.norm().max(1.0));
            }
        }
    }

    #[test]
    fn least_squares_identity_and_consistent() {
        let b = RealVector::from_vec(vec![1.0, -2.0, 3.0]);
        let ls = least_squares_solve(&RealMatrix::identity(3, 3), &b).unwrap();
        assert!((ls.solution.column(0) - &b).norm() < 1e-15);
        assert!(ls.residual[0] < 1e-15);

        let m = random(12, 3, 5);
        let x = RealVector::from_vec(vec![0.5, -1.5, 2.0]);
        let rhs = &m * &x;
        let ls = least_squares_solve(&m, &rhs).unwrap();
        assert!((ls.solution.column(0) - &x).norm() < 1e-12);
        assert!(ls.residual[0] <= 1e-12 * rhs.norm());
        assert!(!ls.rank_deficient);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let m = random(20, 5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let rhs = RealVector::from_fn(20, |_, _| rng.random_range(-1.0..1.0));
        let ls = least_squares_solve(&m, &rhs).unwrap();
        let normal = m.transpose() * &m;
        let oracle = normal.cholesky().unwrap().solve(&(m.transpose() * &rhs));
        assert!((ls.solution.column(0) - oracle).norm() <= 1e-9 * ls.solution.norm());
    }

    #[test]
    fn rank_deficient_least_squares_gives_minimum_norm() {
        // duplicate columns: min-norm solution splits the weight evenly
        let m = RealMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        let rhs = RealVector::from_vec(vec![2.0, 2.0, 0.0]);
        let ls = least_squares_solve(&m, &rhs).unwrap();
        assert!(ls.rank_deficient);
        assert!((ls.solution[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((ls.solution[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lu_solves() {
        let x = dense_lu_solve(
            &RealMatrix::identity(3, 3),
            &RealVector::from_vec(vec![1.0, 2.0, 3.0]),
        )
        .unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0, 3.0]);
        let m = RealMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = dense_lu_solve(&m, &RealVector::from_vec(vec![2.0, 4.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn random_complex_lu_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = ComplexMatrix::from_fn(30, 30, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let b = ComplexVector::from_fn(30, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.3));
        let x = dense_lu_solve(&m, &b).unwrap();
        let resid = (&m * &x - &b).norm();
        assert!(resid <= 1e-10 * m.norm() * x.norm());
    }

    #[test]
    fn singular_lu_is_rejected() {
        let m = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            dense_lu_solve(&m, &RealVector::from_vec(vec![1.0, 1.0])),
            Err(Error::Singular(_))
        ));
    }
}
