//! Conjugate-closed point sets.
//!
//! Real functions only need to be sampled on one member of every conjugate
//! pair, so sets of points (sample grids, support points, poles) are stored as
//! a list of [`Node`]s: a real point, or a complex pair represented by its
//! member in the upper half plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Real { re: f64 },
    Pair { re: f64, im: f64 },
}

impl Node {
    pub fn real(x: f64) -> Self {
        Node::Real { re: x }
    }

    /// Pair containing `z` and its conjugate; `z` may lie in either half plane.
    pub fn pair(z: Complex64) -> Self {
        Node::Pair {
            re: z.re,
            im: z.im.abs(),
        }
    }

    /// Real node when `|Im z| <= rtol * |z|`, otherwise the pair through `z`.
    pub fn classify(z: Complex64, rtol: f64) -> Self {
        if z.im.abs() <= rtol * z.norm() {
            Node::real(z.re)
        } else {
            Node::pair(z)
        }
    }

    /// The real point or the upper member of the pair.
    pub fn value(&self) -> Complex64 {
        match *self {
            Node::Real { re } => Complex64::new(re, 0.0),
            Node::Pair { re, im } => Complex64::new(re, im),
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, Node::Pair { .. })
    }

    /// Number of points represented, 1 or 2.
    pub fn multiplicity(&self) -> usize {
        if self.is_pair() {
            2
        } else {
            1
        }
    }

    /// The represented points, upper member first.
    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            Node::Real { re } => vec![Complex64::new(re, 0.0)],
            Node::Pair { re, im } => vec![Complex64::new(re, im), Complex64::new(re, -im)],
        }
    }
}

/// Total number of points in a node list.
pub fn count(nodes: &[Node]) -> usize {
    nodes.iter().map(Node::multiplicity).sum()
}

/// Flatten nodes to points; pairs appear as `z, conj(z)`.
pub fn expand(nodes: &[Node]) -> Vec<Complex64> {
    nodes.iter().flat_map(Node::points).collect()
}

/// Group a conjugate-closed list into nodes.
///
/// Values with `|Im z| <= rtol * max(|z|, 1e-300)` count as real. Every other
/// value must have a partner within `match_tol * |z|` of its conjugate.
pub fn group(values: &[Complex64], rtol: f64, match_tol: f64) -> Result<Vec<Node>> {
    let mut nodes = Vec::new();
    let mut lower: Vec<Complex64> = Vec::new();
    let mut upper: Vec<Complex64> = Vec::new();
    for &z in values {
        if z.im.abs() <= rtol * z.norm().max(1e-300) {
            nodes.push(Node::real(z.re));
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::NotConjugateClosed(format!(
            "{} values in the upper half plane, {} in the lower",
            upper.len(),
            lower.len()
        )));
    }
    let mut used = vec![false; lower.len()];
    for z in upper {
        let best = lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, w)| (k, (w.conj() - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((k, dist)) if dist <= match_tol * z.norm() => {
                used[k] = true;
                let w = lower[k].conj();
                nodes.push(Node::pair((z + w) * 0.5));
            }
            _ => {
                return Err(Error::NotConjugateClosed(format!(
                    "no conjugate partner for {z}"
                )));
            }
        }
    }
    Ok(nodes)
}

/// Sort nodes: real ones first, each group by real part then imaginary part.
pub fn sort_reals_first(nodes: &mut [Node]) {
    nodes.sort_by(|a, b| {
        a.is_pair()
            .cmp(&b.is_pair())
            .then(a.value().re.total_cmp(&b.value().re))
            .then(a.value().im.total_cmp(&b.value().im))
    });
}
