//! Run manifests: the configuration echo, input digest and tool version
//! written next to every output so a run can be repeated exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use srr_core::{CovarianceDivisor, PipelineConfig, SigmaMethod, SvdMode};

use crate::io::{self, Result};

pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub window: usize,
    pub method: String,
    pub epsilon: f64,
    pub delta_nu: f64,
    pub delta_sigma: f64,
    pub svd_mode: String,
    pub covariance_divisor: String,
    pub regression_divisor: String,
}

fn divisor_name(d: CovarianceDivisor) -> &'static str {
    match d {
        CovarianceDivisor::SampleMinusOne => "m-1",
        CovarianceDivisor::Population => "m",
    }
}

pub fn method_name(m: SigmaMethod) -> &'static str {
    match m {
        SigmaMethod::Direct => "direct",
        SigmaMethod::Regression => "regression",
    }
}

pub fn svd_mode_name(m: SvdMode) -> &'static str {
    match m {
        SvdMode::MinOnly => "min",
        SvdMode::All => "all",
    }
}

impl From<&PipelineConfig> for ConfigEcho {
    fn from(cfg: &PipelineConfig) -> Self {
        Self {
            window: cfg.window,
            method: method_name(cfg.method).into(),
            epsilon: cfg.epsilon,
            delta_nu: cfg.delta_nu,
            delta_sigma: cfg.delta_sigma,
            svd_mode: svd_mode_name(cfg.svd_mode).into(),
            covariance_divisor: divisor_name(cfg.calibration.covariance_divisor).into(),
            regression_divisor: divisor_name(cfg.calibration.regression_divisor).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub algorithm: String,
    pub hex: String,
}

impl InputDigest {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        Self {
            algorithm: DIGEST_ALGORITHM.into(),
            hex: hex::encode(Sha256::digest(bytes)),
        }
    }

    pub fn of_file(path: &Path) -> Result<Self> {
        Ok(Self::of_bytes(&io::load_bytes(path)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<ConfigEcho>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// File names (not paths) of the outputs this manifest describes.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: None,
            input: None,
            seed: None,
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_text(path, &self.to_json())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = io::load_bytes(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| io::IngestError::Format(format!("{}: {e}", path.display())))
    }
}
