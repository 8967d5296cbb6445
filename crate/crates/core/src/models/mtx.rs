//! Matrix Market reading and writing for dense real matrices, plus a JSON
//! manifest naming the files that make up a split-form system.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::functions::{
    beam_function, porous_g1_function, porous_g2_function, BeamMaterial, PorousMaterial,
    ScalarFunction,
};
use super::system::SplitFormSystem;
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::MatrixMarket {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Parse Matrix Market text; `path` is only used in error messages.
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<RealMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, "empty file"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, format!("bad header '{header}'")));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(path, format!("unsupported format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(path, format!("unsupported field '{other}'"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(path, format!("unsupported symmetry '{other}'"))),
    };

    let mut data = lines.filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let size_line = data
        .next()
        .ok_or_else(|| parse_err(path, "missing size line"))?;
    let size: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(path, format!("bad size line '{size_line}'")))
        })
        .collect::<Result<_>>()?;
    let parse_f = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| parse_err(path, format!("bad value '{t}'")))
    };

    match layout {
        Layout::Coordinate => {
            if size.len() != 3 {
                return Err(parse_err(
                    path,
                    "coordinate size line needs rows, cols, entries",
                ));
            }
            let (rows, cols, nnz) = (size[0], size[1], size[2]);
            if symmetry != Symmetry::General && rows != cols {
                return Err(parse_err(path, "symmetric matrix must be square"));
            }
            let mut m = RealMatrix::zeros(rows, cols);
            let mut seen = 0;
            for line in data {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(parse_err(path, format!("bad entry line '{line}'")));
                }
                let i: usize = t[0]
                    .parse()
                    .map_err(|_| parse_err(path, format!("bad row index '{}'", t[0])))?;
                let j: usize = t[1]
                    .parse()
                    .map_err(|_| parse_err(path, format!("bad column index '{}'", t[1])))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(path, format!("index ({i}, {j}) out of range")));
                }
                let v = parse_f(t[2])?;
                m[(i - 1, j - 1)] += v;
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => m[(j - 1, i - 1)] += v,
                        Symmetry::SkewSymmetric => m[(j - 1, i - 1)] -= v,
                    }
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    path,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
            Ok(m)
        }
        Layout::Array => {
            if size.len() != 2 {
                return Err(parse_err(path, "array size line needs rows, cols"));
            }
            let (rows, cols) = (size[0], size[1]);
            if symmetry != Symmetry::General && rows != cols {
                return Err(parse_err(path, "symmetric matrix must be square"));
            }
            let values: Vec<f64> = data
                .flat_map(|l| l.split_whitespace())
                .map(parse_f)
                .collect::<Result<_>>()?;
            let mut m = RealMatrix::zeros(rows, cols);
            let mut it = values.into_iter();
            // column-major, lower triangle only for symmetric storage
            for j in 0..cols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                for i in start..rows {
                    let v = it.next().ok_or_else(|| parse_err(path, "too few values"))?;
                    m[(i, j)] = v;
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => m[(j, i)] = v,
                        Symmetry::SkewSymmetric => m[(j, i)] = -v,
                    }
                }
            }
            if it.next().is_some() {
                return Err(parse_err(path, "too many values"));
            }
            Ok(m)
        }
    }
}

pub fn read_matrix_market(path: &Path) -> Result<RealMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text, path)
}

/// Coordinate format, general symmetry, nonzeros only, shortest round-trip
/// representation of every value.
pub fn format_matrix_market(m: &RealMatrix) -> String {
    let mut entries = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::with_capacity(32 * entries.len() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {v:e}");
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &RealMatrix) -> Result<()> {
    fs::write(path, format_matrix_market(m))?;
    Ok(())
}

/// Which built-in function multiplies a nonlinear matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FunctionSpec {
    /// `beam_g1`, `porous_g1` or `porous_g2`.
    pub name: String,
    /// The function is multiplied by `s^power`.
    #[serde(default)]
    pub power: i32,
}

/// File set of a split-form system; relative paths are resolved against the
/// manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SystemManifest {
    pub a0: PathBuf,
    #[serde(default)]
    pub a1: Option<PathBuf>,
    #[serde(default)]
    pub a2: Option<PathBuf>,
    #[serde(default)]
    pub aneg: Vec<PathBuf>,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
}

fn builtin_function(spec: &FunctionSpec) -> Result<ScalarFunction> {
    let base = match spec.name.as_str() {
        "beam_g1" => beam_function(BeamMaterial::default()),
        "porous_g1" => porous_g1_function(PorousMaterial::default()),
        "porous_g2" => porous_g2_function(PorousMaterial::default()),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown function '{other}'"
            )))
        }
    };
    Ok(base.times_power_of_s(spec.power))
}

/// Load matrices listed in a JSON manifest.
pub fn load_system_matrix_market(manifest_path: &Path) -> Result<SplitFormSystem> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest: SystemManifest = serde_json::from_str(&text)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let functions = manifest
        .functions
        .iter()
        .map(builtin_function)
        .collect::<Result<Vec<_>>>()?;
    load_system_files(dir, &manifest, functions)
}

/// Load matrices from explicit files with caller-provided functions.
pub fn load_system_files(
    dir: &Path,
    manifest: &SystemManifest,
    functions: Vec<ScalarFunction>,
) -> Result<SplitFormSystem> {
    let resolve = |p: &PathBuf| {
        if p.is_absolute() {
            p.clone()
        } else {
            dir.join(p)
        }
    };
    let a0 = read_matrix_market(&resolve(&manifest.a0))?;
    let n = a0.nrows();
    let load_opt = |p: &Option<PathBuf>| -> Result<RealMatrix> {
        match p {
            Some(p) => read_matrix_market(&resolve(p)),
            None => Ok(RealMatrix::zeros(n, a0.ncols())),
        }
    };
    let a1 = load_opt(&manifest.a1)?;
    let a2 = load_opt(&manifest.a2)?;
    let aneg = manifest
        .aneg
        .iter()
        .map(|p| read_matrix_market(&resolve(p)))
        .collect::<Result<Vec<_>>>()?;
    SplitFormSystem::new(a0, a1, a2, aneg, functions)
}
