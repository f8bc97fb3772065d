use std::path::{Path, PathBuf};

use radshock_core::pipeline::PipelineOptions;
use radshock_core::GasState;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Run configuration. Every field has a default, so a config file only
/// needs the keys it changes.
///
/// ```json
/// { "left": { "rho": 1.0, "u": 0.0, "e": 1.0 }, "gamma": 1.4, "a": 1e-3,
///   "options": { "manifold": { "rtol": 1e-11 } } }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub left: GasState,
    pub gamma: f64,
    pub r_gas: f64,
    pub a: f64,
    /// Amplitudes swept by `sweep`.
    pub a_list: Vec<f64>,
    /// Adiabatic exponents swept by `sweep`.
    pub gamma_list: Vec<f64>,
    pub options: PipelineOptions,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            left: GasState {
                rho: 1.0,
                u: 0.0,
                e: 1.0,
            },
            gamma: 1.4,
            r_gas: 1.0,
            a: 1e-3,
            a_list: Vec::new(),
            gamma_list: Vec::new(),
            options: PipelineOptions::default(),
            out: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub a: Option<f64>,
    pub gamma: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub a_list: Option<Vec<f64>>,
    pub gamma_list: Option<Vec<f64>>,
    pub order: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(a) = ov.a {
            cfg.a = a;
        }
        if let Some(g) = ov.gamma {
            cfg.gamma = g;
        }
        if let Some(o) = &ov.out {
            cfg.out = o.clone();
        }
        if let Some(f) = ov.format {
            cfg.format = f;
        }
        if let Some(l) = &ov.a_list {
            cfg.a_list = l.clone();
        }
        if let Some(l) = &ov.gamma_list {
            cfg.gamma_list = l.clone();
        }
        if let Some(n) = ov.order {
            cfg.options.expansion_order = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = [
            self.left.rho,
            self.left.u,
            self.left.e,
            self.gamma,
            self.r_gas,
            self.a,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("numeric fields must be finite".into()));
        }
        if self.a_list.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(CliError::Config("amplitudes must be finite and positive".into()));
        }
        if self.gamma_list.iter().any(|g| !g.is_finite()) {
            return Err(CliError::Config("gamma values must be finite".into()));
        }
        Ok(())
    }

    /// `(γ, a)` pairs of a sweep in row order: γ outer, `a` inner.
    pub fn sweep_pairs(&self) -> Result<Vec<(f64, f64)>, CliError> {
        if self.a_list.is_empty() && self.gamma_list.is_empty() {
            return Err(CliError::Usage(
                "sweep needs a non-empty a_list or gamma_list".into(),
            ));
        }
        let gammas = if self.gamma_list.is_empty() {
            vec![self.gamma]
        } else {
            self.gamma_list.clone()
        };
        let amps = if self.a_list.is_empty() {
            vec![self.a]
        } else {
            self.a_list.clone()
        };
        Ok(gammas
            .iter()
            .flat_map(|&g| amps.iter().map(move |&a| (g, a)))
            .collect())
    }
}

/// Comma-separated list of numbers given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

/// Parse a comma-separated list of numbers; an empty list is a usage error.
pub fn parse_float_list(s: &str) -> Result<FloatList, String> {
    parse_list(s).map(FloatList)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items
        .iter()
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}
