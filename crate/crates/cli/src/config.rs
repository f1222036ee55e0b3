use std::path::{Path, PathBuf};

use qdeform_core::params::{format_quantity, parse_quantity, ParamsError, SMALL_PARAMETER_LIMIT};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "QDEFORM_CONFIG";

/// Thresholds and defaults, loaded from TOML. Every key is optional; command
/// line flags override whatever is set here.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub thresholds: Thresholds,
    pub defaults: Defaults,
    pub params: PhysicalParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Allowed number of surviving terms in an exact residual.
    pub residual_terms: f64,
    /// Projected Frobenius residual of the matrix engine.
    pub matrix_residual: f64,
    /// Relative Frobenius gap between the square-root and cosh matrices.
    pub sqrt_cosh_relative: f64,
    pub qplane_residual: f64,
    pub phase: f64,
    pub unitarity: f64,
    pub periodicity: f64,
    pub small_parameter: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            residual_terms: 0.0,
            matrix_residual: 1e-12,
            sqrt_cosh_relative: 1e-10,
            qplane_residual: 1e-12,
            phase: 1e-12,
            unitarity: 1e-12,
            periodicity: 1e-9,
            small_parameter: SMALL_PARAMETER_LIMIT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub degree: u32,
    pub dim: usize,
    /// Unset means `max(4, N/4)`.
    pub interior: Option<usize>,
    pub level: usize,
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n: String,
    pub dims: String,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            degree: qdeform_core::weyl::DEFAULT_DEGREE,
            dim: 32,
            interior: None,
            level: 1,
            mu: 0.2,
            nu: 0.2,
            alpha: 1.0,
            beta: 1.0,
            n: "0..5".into(),
            dims: "16,32,64,128".into(),
        }
    }
}

/// A number, or a string `"<number> <unit>"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    pub fn tagged(name: &str, value: f64) -> Self {
        Quantity::Text(format_quantity(name, value))
    }

    pub fn value(&self, name: &'static str) -> Result<f64, ParamsError> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(t) => parse_quantity(name, t),
        }
    }
}

/// Physical constants in SI units; natural units when left at the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalParams {
    pub hbar: Quantity,
    pub m: Quantity,
    pub c: Quantity,
    pub omega: Option<Quantity>,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            hbar: Quantity::Number(1.0),
            m: Quantity::Number(1.0),
            c: Quantity::Number(1.0),
            omega: None,
        }
    }
}

/// Resolved numeric values of [`PhysicalParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physical {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    pub omega: Option<f64>,
}

impl PhysicalParams {
    pub fn resolve(&self) -> Result<Physical, ParamsError> {
        Ok(Physical {
            hbar: self.hbar.value("hbar")?,
            m: self.m.value("m")?,
            c: self.c.value("c")?,
            omega: self.omega.as_ref().map(|q| q.value("omega")).transpose()?,
        })
    }

    pub fn from_values(p: Physical) -> Self {
        Self {
            hbar: Quantity::tagged("hbar", p.hbar),
            m: Quantity::tagged("m", p.m),
            c: Quantity::tagged("c", p.c),
            omega: p.omega.map(|w| Quantity::tagged("omega", w)),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.params.resolve()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `--config` if given, else `$QDEFORM_CONFIG` if set and non-empty, else defaults.
    pub fn load(flag: Option<&Path>) -> Result<Self, CliError> {
        let env = std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        match flag.map(Path::to_path_buf).or(env) {
            Some(path) => Self::read(&path),
            None => Ok(Self::default()),
        }
    }
}
