//! TOML parameter files and the bundled presets.
//!
//! Keys: `n`, `k` (binding rates `k_0..k_{n-1}`), `gamma` (`gamma_1..gamma_n`),
//! `kk` (dimer coupling), `delta1`, `delta2`, `theta`, `eps1`, `eps2`. An `r0`
//! key is accepted and ignored; `r0` is always derived from the rates.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Possibly partial parameter set as read from a file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing)]
    r0: Option<f64>,
}

const PRESETS: [(&str, &str); 4] = [
    ("par-common", include_str!("../presets/par-common.toml")),
    ("par-n3", include_str!("../presets/par-n3.toml")),
    ("par-n5", include_str!("../presets/par-n5.toml")),
    ("par-n9", include_str!("../presets/par-n9.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw TOML text of a bundled preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn preset(name: &str) -> Result<ParamsConfig> {
    let src = preset_source(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown preset '{name}' (available: {})",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    ParamsConfig::from_toml_str(src)
}

/// Complete, validated parameters from a preset.
pub fn preset_params(name: &str) -> Result<ModelParams> {
    preset(name)?.to_params()
}

/// Resolves a preset name or a path to a TOML file.
pub fn load(spec: &str) -> Result<ParamsConfig> {
    if preset_source(spec).is_some() {
        return preset(spec);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!(
            "'{spec}' is neither a preset ({}) nor a readable file: {e}",
            preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    ParamsConfig::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl ParamsConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("parameter config is always representable")
    }

    pub fn from_params(p: &ModelParams) -> Self {
        Self {
            n: Some(p.n()),
            k: Some(p.k_binding().to_vec()),
            gamma: Some(p.gamma().to_vec()),
            kk: Some(p.kk()),
            delta1: Some(p.delta1()),
            delta2: Some(p.delta2()),
            theta: Some(p.theta()),
            eps1: Some(p.eps1()),
            eps2: Some(p.eps2()),
            r0: None,
        }
    }

    /// Keys set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &ParamsConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(n, k, gamma, kk, delta1, delta2, theta, eps1, eps2);
        self
    }

    /// Sets one scalar key by name, as used for command-line overrides.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "kk" => self.kk = Some(value),
            "delta1" => self.delta1 = Some(value),
            "delta2" => self.delta2 = Some(value),
            "theta" => self.theta = Some(value),
            "eps1" => self.eps1 = Some(value),
            "eps2" => self.eps2 = Some(value),
            other => {
                return Err(Error::Config(format!(
                    "'{other}' is not a scalar parameter (expected kk, delta1, delta2, theta, eps1 or eps2)"
                )))
            }
        }
        Ok(())
    }

    pub fn missing_keys(&self) -> Vec<&'static str> {
        let mut missing = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_none() { missing.push(stringify!($f)); } )* };
        }
        check!(n, k, gamma, kk, delta1, delta2, theta, eps1, eps2);
        missing
    }

    pub fn to_params(&self) -> Result<ModelParams> {
        let missing = self.missing_keys();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "incomplete parameter set, missing: {}",
                missing.join(", ")
            )));
        }
        ModelParams::new(
            self.n.unwrap(),
            self.k.clone().unwrap(),
            self.gamma.clone().unwrap(),
            self.kk.unwrap(),
            self.delta1.unwrap(),
            self.delta2.unwrap(),
            self.theta.unwrap(),
            self.eps1.unwrap(),
            self.eps2.unwrap(),
        )
    }
}
