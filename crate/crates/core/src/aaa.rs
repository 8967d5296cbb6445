//! Real AAA: greedy barycentric rational approximation of a set of real
//! functions on a conjugate-closed sample set, with every singular value
//! decomposition done on a real matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conj::{self, Node};
use crate::error::{Error, Result};
use crate::linalg::{smallest_right_singular_vector, RealMatrix, RealVector};
use crate::models::{ScalarFunction, SplitFormSystem};

/// Relative singular value gap that signals a Froissart doublet.
pub const FROISSART_RTOL: f64 = 1e-14;

/// Sample points on the imaginary axis, closed under conjugation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    /// One node per conjugate pair, ordered by increasing frequency.
    pub nodes: Vec<Node>,
    pub f_min: f64,
    pub f_max: f64,
    pub n_requested: usize,
}

impl SampleGrid {
    /// `n` log-equispaced angular frequencies in `[2 pi f_min, 2 pi f_max]`,
    /// each contributing the pair `+-i omega`.
    pub fn log_imaginary(f_min: f64, f_max: f64, n: usize) -> Result<Self> {
        if !(f_min > 0.0 && f_max > f_min && f_max.is_finite()) {
            return Err(Error::InvalidRange(format!(
                "need 0 < f_min < f_max, got [{f_min}, {f_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidRange(format!(
                "need at least 2 sample frequencies, got {n}"
            )));
        }
        let lo = (2.0 * std::f64::consts::PI * f_min).log10();
        let hi = (2.0 * std::f64::consts::PI * f_max).log10();
        let nodes = (0..n)
            .map(|k| {
                let omega = if k == 0 {
                    2.0 * std::f64::consts::PI * f_min
                } else if k == n - 1 {
                    2.0 * std::f64::consts::PI * f_max
                } else {
                    10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64)
                };
                Node::Pair { re: 0.0, im: omega }
            })
            .collect();
        Ok(Self {
            nodes,
            f_min,
            f_max,
            n_requested: n,
        })
    }

    /// Arbitrary nodes, e.g. points on the real axis.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidRange("empty sample set".into()));
        }
        if nodes.iter().any(|n| n.value() == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidRange(
                "the origin is excluded from sample sets".into(),
            ));
        }
        let n = nodes.len();
        Ok(Self {
            nodes,
            f_min: f64::NAN,
            f_max: f64::NAN,
            n_requested: n,
        })
    }

    /// All points, pairs expanded as `z, conj(z)`.
    pub fn points(&self) -> Vec<Complex64> {
        conj::expand(&self.nodes)
    }

    pub fn len(&self) -> usize {
        conj::count(&self.nodes)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.value().norm())
            .fold(0.0, f64::max)
    }
}

/// How the functions of a set are weighed against each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scaling {
    /// Relative accuracy per function: weight `1 / max_Z |g_j|`.
    SetValued,
    /// Accuracy relative to the assembled matrix: weight `c_j` (an estimate of
    /// the size of the matrix multiplying `g_j`) and threshold `tol * reference`.
    Weighted {
        coefficient_norms: Vec<f64>,
        reference: f64,
    },
}

/// Samples of the functions on a grid together with their weights.
#[derive(Debug, Clone)]
pub struct FunctionSet {
    pub names: Vec<String>,
    /// `values[j][k]` is `g_j` at the upper member of node `k`.
    pub values: Vec<Vec<Complex64>>,
    pub scaling: Scaling,
}

impl FunctionSet {
    pub fn sample(
        functions: &[ScalarFunction],
        grid: &SampleGrid,
        scaling: Scaling,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidParameter("function set is empty".into()));
        }
        let values = functions
            .iter()
            .map(|f| {
                grid.nodes
                    .iter()
                    .map(|node| f.eval(node.value()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let names = functions.iter().map(|f| f.name().to_string()).collect();
        Self::from_values(names, values, grid, scaling)
    }

    pub fn from_values(
        names: Vec<String>,
        values: Vec<Vec<Complex64>>,
        grid: &SampleGrid,
        scaling: Scaling,
    ) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| v.len() != grid.nodes.len()) {
            return Err(Error::Dimension(
                "one sample per grid node and function expected".into(),
            ));
        }
        if values
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite function sample".into()));
        }
        for (v, node) in values.iter().flat_map(|v| v.iter().zip(&grid.nodes)) {
            if !node.is_pair() && v.im.abs() > 1e-12 * v.norm() {
                return Err(Error::NotConjugateClosed(format!(
                    "non-real value {v} at real point {}",
                    node.value().re
                )));
            }
        }
        if let Scaling::Weighted {
            coefficient_norms,
            reference,
        } = &scaling
        {
            if coefficient_norms.len() != values.len()
                || coefficient_norms.iter().any(|c| !(*c > 0.0))
                || !(*reference > 0.0)
            {
                return Err(Error::InvalidParameter(
                    "weighted scaling needs one positive norm per function".into(),
                ));
            }
        }
        Ok(Self {
            names,
            values,
            scaling,
        })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// `max_Z |g_j|`.
    pub fn sup_norms(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .collect()
    }

    /// Weight of each function in the selection, stacking and stop test.
    pub fn weights(&self) -> Vec<f64> {
        match &self.scaling {
            Scaling::SetValued => self
                .sup_norms()
                .into_iter()
                .map(|n| if n > 0.0 { 1.0 / n } else { 1.0 })
                .collect(),
            Scaling::Weighted {
                coefficient_norms, ..
            } => coefficient_norms.clone(),
        }
    }

    /// Factor multiplying the tolerance in the stop test.
    pub fn threshold_scale(&self) -> f64 {
        match &self.scaling {
            Scaling::SetValued => 1.0,
            Scaling::Weighted { reference, .. } => *reference,
        }
    }
}

/// Conjugate-closed barycentric rational functions sharing support points and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycentricApproximant {
    pub support: Vec<Node>,
    /// Weight of the real point or the upper pair member; the conjugate
    /// member carries the conjugate weight.
    pub weights: Vec<Complex64>,
    /// `values[j][k]`: value of function `j` at the upper member of support node `k`.
    pub values: Vec<Vec<Complex64>>,
}

impl BarycentricApproximant {
    pub fn new(
        support: Vec<Node>,
        weights: Vec<Complex64>,
        values: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if support.is_empty()
            || weights.len() != support.len()
            || values.iter().any(|v| v.len() != support.len())
        {
            return Err(Error::Dimension(
                "support, weights and values must have equal length".into(),
            ));
        }
        let pts = conj::expand(&support);
        for (i, a) in pts.iter().enumerate() {
            if pts[i + 1..].iter().any(|b| b == a) {
                return Err(Error::Duplicate(*a));
            }
        }
        Ok(Self {
            support,
            weights,
            values,
        })
    }

    /// Number of support points, a pair counting twice.
    pub fn degree(&self) -> usize {
        conj::count(&self.support)
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Support points and weights flattened as `sigma, conj(sigma)`.
    pub fn expanded(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut s = Vec::with_capacity(self.degree());
        let mut w = Vec::with_capacity(self.degree());
        for (node, xi) in self.support.iter().zip(&self.weights) {
            s.push(node.value());
            w.push(*xi);
            if node.is_pair() {
                s.push(node.value().conj());
                w.push(xi.conj());
            }
        }
        (s, w)
    }

    /// Value of function `j` at `s`.
    pub fn eval(&self, j: usize, s: Complex64) -> Result<Complex64> {
        if j >= self.m() {
            return Err(Error::Dimension(format!("function index {j} out of range")));
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for ((node, xi), g) in self.support.iter().zip(&self.weights).zip(&self.values[j]) {
            let sigma = node.value();
            if s == sigma {
                return Ok(*g);
            }
            let t = xi / (s - sigma);
            if node.is_pair() {
                if s == sigma.conj() {
                    return Ok(g.conj());
                }
                // pair terms are summed first so that evaluating at conj(s)
                // rounds to exactly the conjugate result
                let tc = xi.conj() / (s - sigma.conj());
                num += g * t + g.conj() * tc;
                den += t + tc;
            } else {
                num += g * t;
                den += t;
            }
        }
        if den == Complex64::new(0.0, 0.0) || !den.is_finite() {
            return Err(Error::Pole(s));
        }
        Ok(num / den)
    }

    /// Finite roots of the denominator `sum xi_i / (s - sigma_i)`.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.degree() < 2 {
            return Ok(Vec::new());
        }
        let lin = crate::linearize::strong_barycentric_linearization(self)?;
        lin.poles()
    }
}

/// Why the iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AaaStatus {
    Converged,
    /// A numerically singular Loewner matrix appeared; the last support was
    /// dropped again and the previous approximant returned.
    FroissartStop,
    /// The degree cap was reached before the tolerance.
    MaxDegree,
}

impl AaaStatus {
    /// Whether the result is acceptable as a converged approximation.
    pub fn is_converged(self) -> bool {
        !matches!(self, AaaStatus::MaxDegree)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AaaIteration {
    pub degree: usize,
    /// Weighted error on the remaining sample points after the iteration.
    pub max_error: f64,
    pub sigma_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct AaaResult {
    pub approximant: BarycentricApproximant,
    pub status: AaaStatus,
    /// Weighted error that the stop test compared with `tol * threshold`.
    pub max_error: f64,
    pub threshold: f64,
    pub history: Vec<AaaIteration>,
}

/// Real Loewner matrix of the stacked, weighted functions for the given
/// active sample nodes and support nodes.
///
/// Rows and columns of pairs are combined so that the result is the real
/// matrix `T L S`, with `T = [[1, 1], [-i, i]] / sqrt 2` acting on each row
/// pair and `S = [[1, i], [1, -i]]` on each column pair.
pub fn build_real_loewner(
    values: &[Vec<Complex64>],
    weights: &[f64],
    nodes: &[Node],
    active: &[usize],
    support: &[usize],
) -> Result<RealMatrix> {
    let act_nodes: Vec<Node> = active.iter().map(|&k| nodes[k]).collect();
    let sup_nodes: Vec<Node> = support.iter().map(|&k| nodes[k]).collect();
    let rows_per_fn = conj::count(&act_nodes);
    let cols = conj::count(&sup_nodes);
    let mut out = RealMatrix::zeros(rows_per_fn * values.len(), cols);
    let r2 = std::f64::consts::SQRT_2;
    for (j, vals) in values.iter().enumerate() {
        let wj = weights[j];
        let mut row = j * rows_per_fn;
        for &zi in active {
            let z = nodes[zi].value();
            let gz = vals[zi];
            let mut col = 0;
            for &si in support {
                let sigma = nodes[si].value();
                if z == sigma || z == sigma.conj() {
                    return Err(Error::SupportInGrid(sigma));
                }
                let gs = vals[si];
                let a = (gz - gs) / (z - sigma) * wj;
                match (nodes[zi].is_pair(), nodes[si].is_pair()) {
                    (false, false) => {
                        out[(row, col)] = a.re;
                    }
                    (false, true) => {
                        out[(row, col)] = 2.0 * a.re;
                        out[(row, col + 1)] = -2.0 * a.im;
                    }
                    (true, false) => {
                        out[(row, col)] = r2 * a.re;
                        out[(row + 1, col)] = r2 * a.im;
                    }
                    (true, true) => {
                        let b = (gz - gs.conj()) / (z - sigma.conj()) * wj;
                        let p = a + b;
                        let q = a - b;
                        out[(row, col)] = r2 * p.re;
                        out[(row, col + 1)] = -r2 * q.im;
                        out[(row + 1, col)] = r2 * p.im;
                        out[(row + 1, col + 1)] = r2 * q.re;
                    }
                }
                col += nodes[si].multiplicity();
            }
            row += nodes[zi].multiplicity();
        }
    }
    Ok(out)
}

/// Complex weights from a real vector `w`: real supports take `w_k`, pairs
/// take `w_k + i w_{k+1}` for the upper member.
pub fn weights_from_real(support: &[Node], w: &RealVector) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(support.len());
    let mut k = 0;
    for node in support {
        if node.is_pair() {
            out.push(Complex64::new(w[k], w[k + 1]));
            k += 2;
        } else {
            out.push(Complex64::new(w[k], 0.0));
            k += 1;
        }
    }
    out
}

struct Snapshot {
    support: Vec<usize>,
    weights: Vec<Complex64>,
    max_error: f64,
}

fn mean_value(vals: &[Complex64], nodes: &[Node]) -> Complex64 {
    let mut sum = 0.0;
    for (v, n) in vals.iter().zip(nodes) {
        sum += if n.is_pair() { 2.0 * v.re } else { v.re };
    }
    Complex64::new(sum / conj::count(nodes) as f64, 0.0)
}

/// Greedy real AAA on the sampled function set.
///
/// At every step the node with the largest weighted error joins the support
/// (a pair joins as both members; on ties the lowest index wins), and new
/// weights come from the smallest right singular vector of the real Loewner
/// matrix. The iteration stops when the weighted error on the remaining nodes
/// drops to `tol * threshold_scale`, when the degree would exceed `d_max`,
/// or when the Loewner matrix becomes numerically singular.
pub fn real_aaa(fs: &FunctionSet, grid: &SampleGrid, tol: f64, d_max: usize) -> Result<AaaResult> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    if fs.values.iter().any(|v| v.len() != grid.nodes.len()) {
        return Err(Error::Dimension(
            "function samples do not match the grid".into(),
        ));
    }
    let nodes = &grid.nodes;
    let nn = nodes.len();
    let m = fs.m();
    let w = fs.weights();
    let threshold = tol * fs.threshold_scale();

    let mut approx: Vec<Vec<Complex64>> = fs
        .values
        .iter()
        .map(|v| vec![mean_value(v, nodes); nn])
        .collect();
    let mut active = vec![true; nn];
    let mut support: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut previous: Option<Snapshot> = None;

    let error_at = |approx: &[Vec<Complex64>], k: usize| -> f64 {
        (0..m)
            .map(|j| w[j] * (approx[j][k] - fs.values[j][k]).norm())
            .fold(0.0, f64::max)
    };

    loop {
        // pick the worst node
        let mut best: Option<(usize, f64)> = None;
        for k in 0..nn {
            if !active[k] {
                continue;
            }
            let e = error_at(&approx, k);
            if best.is_none_or(|(_, be)| e > be) {
                best = Some((k, e));
            }
        }
        let Some((pick, _)) = best else {
            return Err(Error::GridExhausted(conj::count(
                &support.iter().map(|&k| nodes[k]).collect::<Vec<_>>(),
            )));
        };
        let degree: usize = support.iter().map(|&k| nodes[k].multiplicity()).sum();
        if degree + nodes[pick].multiplicity() > d_max {
            let snap = previous.take();
            return finish(fs, nodes, snap, AaaStatus::MaxDegree, threshold, history);
        }
        support.push(pick);
        active[pick] = false;
        let act: Vec<usize> = (0..nn).filter(|&k| active[k]).collect();
        let degree = degree + nodes[pick].multiplicity();
        let rows = m * act.iter().map(|&k| nodes[k].multiplicity()).sum::<usize>();
        if rows < degree {
            return Err(Error::GridExhausted(degree));
        }
        let loewner = build_real_loewner(&fs.values, &w, nodes, &act, &support)?;
        let sv = smallest_right_singular_vector(&loewner)?;
        let sup_nodes: Vec<Node> = support.iter().map(|&k| nodes[k]).collect();
        let weights = weights_from_real(&sup_nodes, &sv.right);

        // new approximation on the remaining nodes
        for k in 0..nn {
            if !active[k] {
                for j in 0..m {
                    approx[j][k] = fs.values[j][k];
                }
                continue;
            }
            let z = nodes[k].value();
            let mut den = Complex64::new(0.0, 0.0);
            let mut num = vec![Complex64::new(0.0, 0.0); m];
            for (&si, xi) in support.iter().zip(&weights) {
                let sigma = nodes[si].value();
                let t = xi / (z - sigma);
                den += t;
                for j in 0..m {
                    num[j] += fs.values[j][si] * t;
                }
                if nodes[si].is_pair() {
                    let t = xi.conj() / (z - sigma.conj());
                    den += t;
                    for j in 0..m {
                        num[j] += fs.values[j][si].conj() * t;
                    }
                }
            }
            for j in 0..m {
                approx[j][k] = num[j] / den;
            }
        }
        let max_error = (0..nn)
            .filter(|&k| active[k])
            .map(|k| error_at(&approx, k))
            .fold(0.0, |a: f64, b| {
                if b.is_nan() || a.is_nan() {
                    f64::NAN
                } else {
                    a.max(b)
                }
            });
        let ratio = if sv.largest > 0.0 {
            sv.value / sv.largest
        } else {
            0.0
        };
        history.push(AaaIteration {
            degree,
            max_error,
            sigma_ratio: ratio,
        });

        let current = Snapshot {
            support: support.clone(),
            weights,
            max_error,
        };
        if max_error <= threshold {
            return finish(
                fs,
                nodes,
                Some(current),
                AaaStatus::Converged,
                threshold,
                history,
            );
        }
        if sv.largest > 0.0 && sv.value < FROISSART_RTOL * sv.largest && previous.is_some() {
            return finish(
                fs,
                nodes,
                previous,
                AaaStatus::FroissartStop,
                threshold,
                history,
            );
        }
        if !max_error.is_finite() {
            return finish(
                fs,
                nodes,
                previous.or(Some(current)),
                AaaStatus::FroissartStop,
                threshold,
                history,
            );
        }
        previous = Some(current);
    }
}

fn finish(
    fs: &FunctionSet,
    nodes: &[Node],
    snap: Option<Snapshot>,
    status: AaaStatus,
    threshold: f64,
    history: Vec<AaaIteration>,
) -> Result<AaaResult> {
    let snap = snap.ok_or_else(|| {
        Error::InvalidParameter("degree cap too small for a single support node".into())
    })?;
    let support: Vec<Node> = snap.support.iter().map(|&k| nodes[k]).collect();
    let values = fs
        .values
        .iter()
        .map(|v| snap.support.iter().map(|&k| v[k]).collect())
        .collect();
    let approximant = BarycentricApproximant::new(support, snap.weights, values)?;
    Ok(AaaResult {
        approximant,
        status,
        max_error: snap.max_error,
        threshold,
        history,
    })
}

fn probe_vector(n: usize, seed: u64) -> RealVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0))
}

/// `sqrt(n) |A v| / |v|` for a seeded vector with entries uniform on `[-1, 1]`.
pub fn estimate_frobenius_norm(
    matvec: impl Fn(&RealVector) -> RealVector,
    n: usize,
    seed: u64,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let v = probe_vector(n, seed);
    let av = matvec(&v);
    (n as f64).sqrt() * av.norm() / v.norm()
}

/// Coordinates of `A0 v, A1 v, A2 v, A_{-1} v, ...` in an orthonormal basis
/// of their span, for a seeded probe vector `v`.
#[derive(Debug, Clone)]
pub struct ProbeCoordinates {
    /// Columns: `A0, A1, A2, A_{-1}, ..., A_{-m}`, each applied to `v`.
    pub coords: DMatrix<f64>,
    pub v_norm: f64,
    pub n: usize,
}

impl ProbeCoordinates {
    pub fn new(system: &SplitFormSystem, seed: u64) -> Self {
        let n = system.n();
        let v = probe_vector(n, seed);
        let mut cols = vec![&system.a0 * &v, &system.a1 * &v, &system.a2 * &v];
        cols.extend(system.aneg.iter().map(|a| a * &v));
        let k = cols.len();
        let stacked = DMatrix::from_columns(&cols);
        let qr = stacked.qr();
        let r = qr.r();
        let rows = r.nrows().min(k);
        Self {
            coords: r.rows(0, rows).into_owned(),
            v_norm: v.norm(),
            n,
        }
    }

    /// `|A(s) v|` given the function values at `s`.
    pub fn apply_norm(&self, s: Complex64, g: &[Complex64]) -> f64 {
        let mut coef = vec![Complex64::new(1.0, 0.0), s, s * s];
        coef.extend_from_slice(g);
        self.combine(&coef)
    }

    /// `|sum_j coef_j * column_j|`.
    pub fn combine(&self, coef: &[Complex64]) -> f64 {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.coords.nrows()];
        for (c, col) in coef.iter().zip(self.coords.column_iter()) {
            for (a, x) in acc.iter_mut().zip(col.iter()) {
                *a += c * x;
            }
        }
        acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|A(s) v - R(s) v|` for the function errors `g_j(s) - r_j(s)`.
    pub fn error_norm(&self, diff: &[Complex64]) -> f64 {
        let mut coef = vec![Complex64::new(0.0, 0.0); 3];
        coef.extend_from_slice(diff);
        self.combine(&coef)
    }
}

/// Per-point estimates `(|A(s) v - R(s) v|, |A(s) v|)` on the grid, with
/// `approx(j, s)` the approximation of `f_j`.
pub fn weighted_error_estimate(
    system: &SplitFormSystem,
    approx: impl Fn(usize, Complex64) -> Result<Complex64>,
    grid: &SampleGrid,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let probe = ProbeCoordinates::new(system, seed);
    grid.nodes
        .iter()
        .map(|node| {
            let s = node.value();
            let g: Vec<Complex64> = system
                .functions
                .iter()
                .map(|f| f.eval(s))
                .collect::<Result<_>>()?;
            let diff: Vec<Complex64> = g
                .iter()
                .enumerate()
                .map(|(j, gj)| Ok(gj - approx(j, s)?))
                .collect::<Result<_>>()?;
            Ok((probe.error_norm(&diff), probe.apply_norm(s, &g)))
        })
        .collect()
}

/// Weighted scaling for a system: `c_j` estimates `|A_{-j}|_F` times
/// `max_Z |s|^{p_j}` when `f_j / s^{p_j}` is what gets approximated, and the
/// reference is `max_Z sqrt(n) |A(s) v| / |v|`.
pub fn weighted_scaling(
    system: &SplitFormSystem,
    grid: &SampleGrid,
    powers: &[i32],
    seed: u64,
) -> Result<Scaling> {
    let n = system.n();
    let smax = grid.max_modulus();
    let coefficient_norms = system
        .aneg
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let p = powers.get(j).copied().unwrap_or(0);
            estimate_frobenius_norm(|v| a * v, n, seed) * smax.powi(p)
        })
        .collect();
    let probe = ProbeCoordinates::new(system, seed);
    let mut reference: f64 = 0.0;
    for node in &grid.nodes {
        let s = node.value();
        let g: Vec<Complex64> = system
            .functions
            .iter()
            .map(|f| f.eval(s))
            .collect::<Result<_>>()?;
        reference = reference.max((n as f64).sqrt() * probe.apply_norm(s, &g) / probe.v_norm);
    }
    Ok(Scaling::Weighted {
        coefficient_norms,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_three_points() {
        let g = SampleGrid::log_imaginary(1.0, 100.0, 3).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        for (k, f) in [1.0, 10.0, 100.0].iter().enumerate() {
            assert!((pts[2 * k] - c(0.0, two_pi * f)).norm() <= 1e-12 * two_pi * f);
            assert_eq!(pts[2 * k + 1], pts[2 * k].conj());
        }
    }

    #[test]
    fn grid_errors_and_endpoints() {
        assert!(matches!(
            SampleGrid::log_imaginary(1.0, 1.0, 5),
            Err(Error::InvalidRange(_))
        ));
        assert!(SampleGrid::log_imaginary(1.0, 10.0, 1).is_err());
        let g = SampleGrid::log_imaginary(1.0, 1e4, 1000).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        assert_eq!(g.nodes[0].value(), c(0.0, two_pi));
        assert_eq!(g.nodes[999].value(), c(0.0, two_pi * 1e4));
    }

    #[test]
    fn real_points_give_raw_loewner() {
        let nodes: Vec<Node> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&x| Node::real(x))
            .collect();
        let vals = vec![nodes
            .iter()
            .map(|n| c(1.0 / (n.value().re + 1.0), 0.0))
            .collect::<Vec<_>>()];
        let l = build_real_loewner(&vals, &[1.0], &nodes, &[0, 2], &[1, 3]).unwrap();
        for (r, &zi) in [0usize, 2].iter().enumerate() {
            for (k, &si) in [1usize, 3].iter().enumerate() {
                let z = nodes[zi].value().re;
                let s = nodes[si].value().re;
                let expect = (vals[0][zi].re - vals[0][si].re) / (z - s);
                assert_eq!(l[(r, k)], expect);
            }
        }
    }

    #[test]
    fn pair_support_on_real_rows() {
        let nodes = vec![Node::real(1.0), Node::pair(c(-1.0, 2.0))];
        let f = |s: Complex64| 1.0 / (s + 3.0);
        let vals = vec![nodes.iter().map(|n| f(n.value())).collect::<Vec<_>>()];
        let l = build_real_loewner(&vals, &[1.0], &nodes, &[0], &[1]).unwrap();
        let a = (vals[0][0] - vals[0][1]) / (nodes[0].value() - nodes[1].value());
        assert!((l[(0, 0)] - 2.0 * a.re).abs() < 1e-15);
        assert!((l[(0, 1)] + 2.0 * a.im).abs() < 1e-15);
    }

    #[test]
    fn constant_function_on_real_grid() {
        let nodes: Vec<Node> = (1..=10).map(|k| Node::real(k as f64)).collect();
        let grid = SampleGrid::from_nodes(nodes).unwrap();
        let fs = FunctionSet::from_values(
            vec!["c".into()],
            vec![vec![c(3.5, 0.0); 10]],
            &grid,
            Scaling::SetValued,
        )
        .unwrap();
        let res = real_aaa(&fs, &grid, 1e-13, 20).unwrap();
        assert_eq!(res.approximant.degree(), 1);
        assert_eq!(res.status, AaaStatus::Converged);
        assert!((res.approximant.eval(0, c(0.3, 7.0)).unwrap() - 3.5).norm() < 1e-14);
    }

    #[test]
    fn degree_one_rational_is_recovered() {
        let grid = SampleGrid::log_imaginary(0.01, 100.0, 200).unwrap();
        let f = ScalarFunction::from_fn("f", |s| 1.0 / (s + 1.0));
        let fs = FunctionSet::sample(std::slice::from_ref(&f), &grid, Scaling::SetValued).unwrap();
        let res = real_aaa(&fs, &grid, 1e-12, 20).unwrap();
        assert!(res.approximant.degree() <= 3);
        let gmax = fs.sup_norms()[0];
        for p in grid.points() {
            let e = (res.approximant.eval(0, p).unwrap() - f.eval(p).unwrap()).norm();
            assert!(e <= 1e-12 * gmax, "{e}");
        }
    }

    #[test]
    fn eval_interpolates_and_is_real() {
        let grid = SampleGrid::log_imaginary(0.1, 1000.0, 300).unwrap();
        let f = ScalarFunction::from_fn("f", |s: Complex64| (s + 2.0).sqrt() / (s + 0.5));
        let fs = FunctionSet::sample(&[f], &grid, Scaling::SetValued).unwrap();
        let r = real_aaa(&fs, &grid, 1e-10, 40).unwrap().approximant;
        for (node, g) in r.support.iter().zip(&r.values[0]) {
            assert_eq!(r.eval(0, node.value()).unwrap(), *g);
            assert_eq!(r.eval(0, node.value().conj()).unwrap(), g.conj());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let s = c(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let a = r.eval(0, s.conj()).unwrap();
            let b = r.eval(0, s).unwrap().conj();
            assert!(
                (a - b).norm() <= 1e-12 * (1.0 + b.norm()),
                "{s}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn single_support_is_constant() {
        let r = BarycentricApproximant::new(
            vec![Node::real(2.0)],
            vec![c(0.7, 0.0)],
            vec![vec![c(4.0, 0.0)]],
        )
        .unwrap();
        assert_eq!(r.eval(0, c(-3.0, 1.0)).unwrap(), c(4.0, 0.0));
        assert!(r.poles().unwrap().is_empty());
    }

    #[test]
    fn frobenius_estimate_basics() {
        assert!((estimate_frobenius_norm(|v| v.clone(), 4, 1) - 2.0).abs() < 1e-14);
        assert_eq!(estimate_frobenius_norm(|v| v * 0.0, 4, 1), 0.0);
    }
}
