//! Least-squares refits on a fixed set of poles: barycentric refits with frozen
//! support points, weighted partial fractions and weighted inverse Newton
//! bases, optionally extended by a quadratic polynomial part.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aaa::{BarycentricApproximant, SampleGrid};
use crate::conj::{self, Node};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_solve_many, RealMatrix};

/// Condition number above which a partial fraction basis is replaced by the
/// inverse Newton basis.
pub const PARTIAL_FRACTION_COND_LIMIT: f64 = 1e12;

/// Relative separation below which two poles are reported as nearly repeated.
pub const POLE_SEPARATION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Remove poles with nonnegative real part.
    Drop,
    /// Reflect them into the left half plane.
    Flip,
}

/// Stable subset (or reflection) of a conjugate-closed pole list.
pub fn filter_poles(poles: &[Node], mode: FilterMode) -> Vec<Node> {
    let mut out: Vec<Node> = Vec::with_capacity(poles.len());
    for p in poles {
        let z = p.value();
        let kept = if z.re < 0.0 {
            Some(*p)
        } else {
            match mode {
                FilterMode::Drop => None,
                FilterMode::Flip if z.re > 0.0 => Some(match *p {
                    Node::Real { re } => Node::real(-re),
                    Node::Pair { re, im } => Node::Pair { re: -re, im },
                }),
                FilterMode::Flip => None,
            }
        };
        if let Some(k) = kept {
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleBasisKind {
    PartialFraction,
    InverseNewton,
}

/// Poles (real ones first) with positive scaling weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleBasis {
    /// Serialized as `form`; `kind` is taken by the [`Basis`] tag.
    #[serde(rename = "form")]
    pub kind: PoleBasisKind,
    pub poles: Vec<Node>,
    /// Natural logarithm of the scaling weight of each node.
    pub log_xi: Vec<f64>,
}

/// `ln |s - mu|` summed along the inverse Newton chain for every node, i.e. the
/// log-modulus of the running product. Pairs continue the chain through their
/// upper members; the conjugate chain has the same modulus on conjugate points.
fn chain_log_moduli(poles: &[Node], s: Complex64) -> Vec<f64> {
    let mut acc = 0.0;
    poles
        .iter()
        .map(|p| {
            acc += (s - p.value()).norm().ln();
            acc
        })
        .collect()
}

/// Scaling weights `xi_i` with `xi_i / |prod| <= 1` on the grid: the minimum
/// distance to the grid for partial fractions, the minimum running product for
/// inverse Newton (computed in log-modulus).
pub fn scaling_weights(kind: PoleBasisKind, poles: &[Node], grid: &SampleGrid) -> Result<Vec<f64>> {
    Ok(log_scaling_weights(kind, poles, grid)?
        .into_iter()
        .map(f64::exp)
        .collect())
}

fn log_scaling_weights(kind: PoleBasisKind, poles: &[Node], grid: &SampleGrid) -> Result<Vec<f64>> {
    let mut out = vec![f64::INFINITY; poles.len()];
    // both members of a pair node see the same distances on a conjugate-closed grid
    let points: Vec<Complex64> = grid.points();
    for z in points {
        let logs: Vec<f64> = match kind {
            PoleBasisKind::PartialFraction => {
                poles.iter().map(|p| (z - p.value()).norm().ln()).collect()
            }
            PoleBasisKind::InverseNewton => chain_log_moduli(poles, z),
        };
        for (o, l) in out.iter_mut().zip(logs) {
            *o = o.min(l);
        }
    }
    for (p, l) in poles.iter().zip(&out) {
        if !l.is_finite() {
            return Err(Error::PoleOnGrid { pole: p.value() });
        }
    }
    Ok(out)
}

impl PoleBasis {
    /// Sorts the poles (real first) and computes scaling weights on `grid`.
    pub fn new(kind: PoleBasisKind, poles: &[Node], grid: &SampleGrid) -> Result<Self> {
        let mut poles = poles.to_vec();
        conj::sort_reals_first(&mut poles);
        let pts = conj::expand(&poles);
        for (i, a) in pts.iter().enumerate() {
            if pts[i + 1..].iter().any(|b| b == a) {
                return Err(Error::Duplicate(*a));
            }
        }
        let log_xi = log_scaling_weights(kind, &poles, grid)?;
        Ok(Self {
            kind,
            poles,
            log_xi,
        })
    }

    pub fn xi(&self) -> Vec<f64> {
        self.log_xi.iter().map(|l| l.exp()).collect()
    }

    /// Number of basis functions besides the constant.
    pub fn len(&self) -> usize {
        conj::count(&self.poles)
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Smallest pairwise distance between poles relative to the largest modulus.
    pub fn relative_separation(&self) -> f64 {
        let pts = conj::expand(&self.poles);
        let scale = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut best = f64::INFINITY;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        if scale > 0.0 {
            best / scale
        } else {
            f64::INFINITY
        }
    }

    /// Complex basis functions, pairs expanded as `(phi, conj-phi)`.
    pub fn complex_columns(&self, s: Complex64) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.len());
        match self.kind {
            PoleBasisKind::PartialFraction => {
                for (p, l) in self.poles.iter().zip(&self.log_xi) {
                    let xi = l.exp();
                    for mu in p.points() {
                        if s == mu {
                            return Err(Error::Pole(s));
                        }
                        out.push(xi / (s - mu));
                    }
                }
            }
            PoleBasisKind::InverseNewton => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut acc_conj = Complex64::new(0.0, 0.0);
                for (p, l) in self.poles.iter().zip(&self.log_xi) {
                    let mu = p.value();
                    if s == mu || s == mu.conj() {
                        return Err(Error::Pole(s));
                    }
                    acc += (s - mu).ln();
                    acc_conj += (s - mu.conj()).ln();
                    out.push((Complex64::new(*l, 0.0) - acc).exp());
                    if p.is_pair() {
                        out.push((Complex64::new(*l, 0.0) - acc_conj).exp());
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Map `(phi, conj-phi)` pairs to the real functions `(phi + conj-phi, i (phi - conj-phi))`.
pub fn realify_columns(nodes: &[Node], complex: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(complex.len());
    let mut k = 0;
    let i = Complex64::new(0.0, 1.0);
    for n in nodes {
        if n.is_pair() {
            let (a, b) = (complex[k], complex[k + 1]);
            out.push(a + b);
            out.push(i * (a - b));
            k += 2;
        } else {
            out.push(complex[k]);
            k += 1;
        }
    }
    out
}

/// Rational part of a refit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Basis {
    /// Barycentric basis `phi_k = (xi_k / (s - sigma_k)) / sum_i xi_i / (s - sigma_i)`
    /// with frozen support points and weights; it contains the constants.
    Barycentric {
        support: Vec<Node>,
        weights: Vec<Complex64>,
    },
    Poles(PoleBasis),
}

impl Basis {
    fn nodes(&self) -> &[Node] {
        match self {
            Basis::Barycentric { support, .. } => support,
            Basis::Poles(p) => &p.poles,
        }
    }

    /// Number of real basis functions, not counting a constant.
    pub fn len(&self) -> usize {
        conj::count(self.nodes())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the constant function needs its own column.
    pub fn needs_constant(&self) -> bool {
        matches!(self, Basis::Poles(_))
    }

    /// Real basis functions evaluated at `s`.
    pub fn real_columns(&self, s: Complex64) -> Result<Vec<Complex64>> {
        let complex = match self {
            Basis::Barycentric { support, weights } => barycentric_columns(support, weights, s)?,
            Basis::Poles(p) => p.complex_columns(s)?,
        };
        Ok(realify_columns(self.nodes(), &complex))
    }

    /// Poles of every function in the span.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        match self {
            Basis::Poles(p) => Ok(conj::expand(&p.poles)),
            Basis::Barycentric { support, weights } => {
                let m = vec![vec![Complex64::new(0.0, 0.0); support.len()]];
                BarycentricApproximant::new(support.clone(), weights.clone(), m)?.poles()
            }
        }
    }
}

fn barycentric_columns(
    support: &[Node],
    weights: &[Complex64],
    s: Complex64,
) -> Result<Vec<Complex64>> {
    let count = conj::count(support);
    let mut terms = Vec::with_capacity(count);
    let mut hit = None;
    for (node, xi) in support.iter().zip(weights) {
        let sigma = node.value();
        if s == sigma {
            hit = Some(terms.len());
        }
        terms.push(if s == sigma {
            Complex64::new(0.0, 0.0)
        } else {
            xi / (s - sigma)
        });
        if node.is_pair() {
            if s == sigma.conj() {
                hit = Some(terms.len());
            }
            terms.push(if s == sigma.conj() {
                Complex64::new(0.0, 0.0)
            } else {
                xi.conj() / (s - sigma.conj())
            });
        }
    }
    if let Some(k) = hit {
        let mut out = vec![Complex64::new(0.0, 0.0); count];
        out[k] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    // pair members are added first so that den(conj s) = conj den(s) exactly
    let mut den = Complex64::new(0.0, 0.0);
    let mut k = 0;
    for node in support {
        if node.is_pair() {
            den += terms[k] + terms[k + 1];
            k += 2;
        } else {
            den += terms[k];
            k += 1;
        }
    }
    if den == Complex64::new(0.0, 0.0) || !den.is_finite() {
        return Err(Error::Pole(s));
    }
    Ok(terms.into_iter().map(|t| t / den).collect())
}

/// Diagnostics of a refit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RefitInfo {
    /// Condition number of the column-equilibrated least-squares matrix.
    pub condition: f64,
    pub rank_deficient: bool,
    /// The partial fraction basis was too ill-conditioned and inverse Newton was used.
    pub switched_to_inverse_newton: bool,
    /// No poles were left; only a polynomial was fitted.
    pub polynomial_only: bool,
    /// Two poles lie closer than the simple-pole separation threshold.
    pub nearly_repeated_poles: bool,
    /// Root-mean-square grid error per function.
    pub rms_error: Vec<f64>,
}

/// `alpha0 + s alpha1 + s^2 alpha2 + sum_i b_i psi_i(s)` per function, with real
/// basis functions `psi_i` from [`Basis::real_columns`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefitApproximant {
    pub basis: Basis,
    /// `coefficients[j][i]` multiplies `psi_i` in function `j`.
    pub coefficients: Vec<Vec<f64>>,
    /// `[alpha0, alpha1, alpha2]` per function.
    pub alpha: Vec<[f64; 3]>,
    pub extended: bool,
    pub info: RefitInfo,
}

impl RefitApproximant {
    /// The barycentric approximant itself: coefficients are the support values.
    pub fn from_barycentric(r: &BarycentricApproximant) -> Self {
        let coefficients = r
            .values
            .iter()
            .map(|vals| {
                let mut c = Vec::with_capacity(r.degree());
                for (node, g) in r.support.iter().zip(vals) {
                    c.push(g.re);
                    if node.is_pair() {
                        c.push(g.im);
                    }
                }
                c
            })
            .collect();
        Self {
            basis: Basis::Barycentric {
                support: r.support.clone(),
                weights: r.weights.clone(),
            },
            coefficients,
            alpha: vec![[0.0; 3]; r.m()],
            extended: false,
            info: RefitInfo::default(),
        }
    }

    pub fn m(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, j: usize, s: Complex64) -> Result<Complex64> {
        if j >= self.m() {
            return Err(Error::Dimension(format!("function index {j} out of range")));
        }
        let cols = self.basis.real_columns(s)?;
        let [a0, a1, a2] = self.alpha[j];
        let mut out = Complex64::new(a0, 0.0) + s * a1 + s * s * a2;
        for (b, psi) in self.coefficients[j].iter().zip(cols) {
            out += psi * *b;
        }
        Ok(out)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        self.basis.poles()
    }
}

/// Least-squares fit of the sampled functions in the span of `basis`
/// (plus a constant for pole bases, plus `s` and `s^2` when `extended`).
///
/// Pairs of sample points enter as the rows `sqrt 2 Re` and `sqrt 2 Im`, so
/// that the real problem has the same residual as the complex one on the
/// full conjugate-closed grid and the coefficients are real.
pub fn ls_refit(
    values: &[Vec<Complex64>],
    grid: &SampleGrid,
    basis: Basis,
    extended: bool,
) -> Result<RefitApproximant> {
    if values.iter().any(|v| v.len() != grid.nodes.len()) {
        return Err(Error::Dimension(
            "one sample per grid node and function expected".into(),
        ));
    }
    let nb = basis.len();
    let constant = basis.needs_constant() as usize;
    let ncols = constant + nb + if extended { 2 } else { 0 };
    let nrows = grid.len();
    if nrows < ncols.max(1) {
        return Err(Error::Dimension(format!(
            "{nrows} sample points cannot determine {ncols} coefficients"
        )));
    }
    let mut mat = RealMatrix::zeros(nrows, ncols);
    let mut rhs = RealMatrix::zeros(nrows, values.len());
    let r2 = std::f64::consts::SQRT_2;
    let mut row = 0;
    for (k, node) in grid.nodes.iter().enumerate() {
        let s = node.value();
        let mut entries = Vec::with_capacity(ncols);
        if constant == 1 {
            entries.push(Complex64::new(1.0, 0.0));
        }
        entries.extend(basis.real_columns(s)?);
        if extended {
            entries.push(s);
            entries.push(s * s);
        }
        if node.is_pair() {
            for (c, e) in entries.iter().enumerate() {
                mat[(row, c)] = r2 * e.re;
                mat[(row + 1, c)] = r2 * e.im;
            }
            for (j, v) in values.iter().enumerate() {
                rhs[(row, j)] = r2 * v[k].re;
                rhs[(row + 1, j)] = r2 * v[k].im;
            }
            row += 2;
        } else {
            for (c, e) in entries.iter().enumerate() {
                mat[(row, c)] = e.re;
            }
            for (j, v) in values.iter().enumerate() {
                rhs[(row, j)] = v[k].re;
            }
            row += 1;
        }
    }
    // column equilibration
    let scales: Vec<f64> = mat
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                1.0 / n
            } else {
                1.0
            }
        })
        .collect();
    for (c, sc) in scales.iter().enumerate() {
        mat.column_mut(c).scale_mut(*sc);
    }
    let ls = least_squares_solve_many(&mat, &rhs)?;
    let npts = grid.len() as f64;
    let mut coefficients = Vec::with_capacity(values.len());
    let mut alpha = Vec::with_capacity(values.len());
    let mut rms = Vec::with_capacity(values.len());
    for j in 0..values.len() {
        let x: Vec<f64> = (0..ncols)
            .map(|c| ls.solution[(c, j)] * scales[c])
            .collect();
        let a0 = if constant == 1 { x[0] } else { 0.0 };
        let (a1, a2) = if extended {
            (x[ncols - 2], x[ncols - 1])
        } else {
            (0.0, 0.0)
        };
        coefficients.push(x[constant..constant + nb].to_vec());
        alpha.push([a0, a1, a2]);
        rms.push(ls.residual[j] / npts.sqrt());
    }
    let nearly_repeated = match &basis {
        Basis::Poles(p) => p.relative_separation() < POLE_SEPARATION_RTOL,
        Basis::Barycentric { .. } => false,
    };
    let info = RefitInfo {
        condition: ls.condition,
        rank_deficient: ls.rank_deficient,
        switched_to_inverse_newton: false,
        polynomial_only: nb == 0 && constant == 1,
        nearly_repeated_poles: nearly_repeated,
        rms_error: rms,
    };
    Ok(RefitApproximant {
        basis,
        coefficients,
        alpha,
        extended,
        info,
    })
}

/// Refit on explicit poles: weighted partial fractions, falling back to the
/// inverse Newton basis when the former is too ill-conditioned.
pub fn refit_with_poles(
    values: &[Vec<Complex64>],
    grid: &SampleGrid,
    poles: &[Node],
    extended: bool,
) -> Result<RefitApproximant> {
    let pf = PoleBasis::new(PoleBasisKind::PartialFraction, poles, grid)?;
    let fit = ls_refit(values, grid, Basis::Poles(pf), extended)?;
    if fit.info.condition <= PARTIAL_FRACTION_COND_LIMIT {
        return Ok(fit);
    }
    let inb = PoleBasis::new(PoleBasisKind::InverseNewton, poles, grid)?;
    let mut fit = ls_refit(values, grid, Basis::Poles(inb), extended)?;
    fit.info.switched_to_inverse_newton = true;
    Ok(fit)
}
