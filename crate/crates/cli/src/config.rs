//! Run configuration: a flat TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use ratlin::pipeline::{FitOptions, Method, Prep, ScalingMode};
use ratlin::timedomain::Scheme;

/// Options shared by all subcommands. Every flag may also be given in the
/// config file under the same name (with `-` written as `_`).
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// TOML config file; flags override its entries.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// `beam`, `porous`, or a system manifest (.json) of Matrix Market files.
    #[arg(long)]
    pub model: Option<String>,
    /// Size of the surrogate models.
    #[arg(long)]
    pub n: Option<usize>,
    /// Lower end of the frequency range (Hz).
    #[arg(long)]
    pub fmin: Option<f64>,
    /// Upper end of the frequency range (Hz).
    #[arg(long)]
    pub fmax: Option<f64>,
    /// Number of sample frequencies.
    #[arg(long)]
    pub nz: Option<usize>,
    /// AAA tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Cap on the AAA degree.
    #[arg(long)]
    pub dmax: Option<usize>,
    /// aaa, aaa-ls, e-aaa, f-aaa, s-aaa, e-f-aaa or e-s-aaa.
    #[arg(long)]
    pub method: Option<String>,
    /// none, g2/s or g2/s2.
    #[arg(long)]
    pub prep: Option<String>,
    /// weighted or set-valued.
    #[arg(long)]
    pub scaling: Option<String>,
    /// cn or be.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Time step (s).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time (s).
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Angular frequency of the forcing `Re(b0 e^{i omega t})` (rad/s).
    #[arg(long)]
    pub omega: Option<f64>,
    /// Initial state: harmonic (needs omega), rest or zero.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Beam,
    Porous,
    Files(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Harmonic,
    Rest,
    Zero,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSource,
    pub n: usize,
    pub fit: FitOptions,
    pub scheme: Scheme,
    pub dt: f64,
    pub tmax: f64,
    pub omega: Option<f64>,
    pub init: Init,
    pub out: PathBuf,
}

/// A problem with the configuration; exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

macro_rules! merge {
    ($flags:ident, $file:ident, $($field:ident),*) => {
        RunArgs { config: $flags.config.clone(), $($field: $flags.$field.clone().or($file.$field),)* }
    };
}

impl RunArgs {
    fn merged(&self) -> Result<RunArgs, ConfigError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => RunArgs::default(),
        };
        let flags = self;
        Ok(merge!(
            flags, file, model, n, fmin, fmax, nz, tol, dmax, method, prep, scaling, scheme, dt,
            tmax, omega, init, seed, out
        ))
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let a = self.merged()?;
        let model = match a.model.as_deref().unwrap_or("beam") {
            "beam" => ModelSource::Beam,
            "porous" => ModelSource::Porous,
            path if path.ends_with(".json") => ModelSource::Files(PathBuf::from(path)),
            other => {
                return Err(err(format!(
                    "unknown model '{other}' (beam, porous or a .json manifest)"
                )))
            }
        };
        let parse = |name: &str, v: Option<&str>, default: &str| -> Result<String, ConfigError> {
            let v = v.unwrap_or(default);
            if v.is_empty() {
                return Err(err(format!("--{name} must not be empty")));
            }
            Ok(v.to_string())
        };
        let method: Method = parse("method", a.method.as_deref(), "aaa")?
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        let prep: Prep = parse("prep", a.prep.as_deref(), "none")?
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        let scaling = match parse("scaling", a.scaling.as_deref(), "weighted")?.as_str() {
            "weighted" => ScalingMode::Weighted,
            "set-valued" => ScalingMode::SetValued,
            other => {
                return Err(err(format!(
                    "unknown scaling '{other}' (weighted or set-valued)"
                )))
            }
        };
        let scheme: Scheme = parse("scheme", a.scheme.as_deref(), "cn")?
            .parse()
            .map_err(|e| err(format!("{e}")))?;
        let defaults = FitOptions::default();
        let fit = FitOptions {
            f_min: a.fmin.unwrap_or(defaults.f_min),
            f_max: a.fmax.unwrap_or(defaults.f_max),
            nz: a.nz.unwrap_or(defaults.nz),
            tol: a.tol.unwrap_or(defaults.tol),
            d_max: a.dmax.unwrap_or(defaults.d_max),
            method,
            prep,
            scaling,
            seed: a.seed.unwrap_or(defaults.seed),
        };
        let omega = a.omega;
        let init = match a.init.as_deref() {
            None if omega.is_some() => Init::Harmonic,
            None => Init::Rest,
            Some("harmonic") => Init::Harmonic,
            Some("rest") => Init::Rest,
            Some("zero") => Init::Zero,
            Some(other) => {
                return Err(err(format!(
                    "unknown initial state '{other}' (harmonic, rest or zero)"
                )))
            }
        };
        let cfg = RunConfig {
            model,
            n: a.n.unwrap_or(20),
            fit,
            scheme,
            dt: a.dt.unwrap_or(1e-5),
            tmax: a.tmax.unwrap_or(2e-2),
            omega,
            init,
            out: a.out.unwrap_or_else(|| PathBuf::from(".")),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("fmin", self.fit.f_min),
            ("fmax", self.fit.f_max),
            ("tol", self.fit.tol),
            ("dt", self.dt),
            ("tmax", self.tmax),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(err(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.fit.f_max <= self.fit.f_min {
            return Err(err(format!(
                "--fmax ({}) must exceed --fmin ({})",
                self.fit.f_max, self.fit.f_min
            )));
        }
        if self.fit.nz < 2 {
            return Err(err("--nz must be at least 2"));
        }
        if self.fit.d_max == 0 {
            return Err(err("--dmax must be positive"));
        }
        if self.n < 2 && !matches!(self.model, ModelSource::Files(_)) {
            return Err(err("--n must be at least 2"));
        }
        if let Some(w) = self.omega {
            if !(w > 0.0 && w.is_finite()) {
                return Err(err(format!("--omega must be positive, got {w}")));
            }
        }
        if self.init == Init::Harmonic && self.omega.is_none() {
            return Err(err("a harmonic initial state needs --omega"));
        }
        Ok(())
    }

    /// Number of time steps to reach `tmax`.
    pub fn steps(&self) -> usize {
        (self.tmax / self.dt).round().max(1.0) as usize
    }
}

fn read_config(path: &Path) -> Result<RunArgs, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| err(format!("{}: {e}", path.display())))
}
