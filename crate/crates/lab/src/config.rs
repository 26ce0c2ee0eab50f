//! JSON run configurations. Every object rejects keys it does not know.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nw_core::sampling::SQRT_3_OVER_2;
use nw_core::{DistributionSpec, ExperimentConfig, TieBreak};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::mnist::MnistSweepConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakKey {
    #[default]
    PlusOne,
    MinusOne,
}

impl From<TieBreakKey> for TieBreak {
    fn from(t: TieBreakKey) -> Self {
        match t {
            TieBreakKey::PlusOne => TieBreak::PlusOne,
            TieBreakKey::MinusOne => TieBreak::MinusOne,
        }
    }
}

fn default_reps() -> usize {
    50
}
fn default_n_test() -> usize {
    1000
}
fn default_mnist_n_test() -> usize {
    500
}
fn default_inner_mass() -> f64 {
    0.1
}
fn default_cap_height() -> f64 {
    SQRT_3_OVER_2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub m: usize,
    pub p_values: Vec<f64>,
    pub betas: Vec<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub input_noise_sigma: f64,
    /// When present, one sweep per value (overrides `input_noise_sigma`).
    #[serde(default)]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default)]
    pub noisy_test_inputs: bool,
    #[serde(default)]
    pub tie_break: TieBreakKey,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSection {
    OneDMixture {
        #[serde(default = "default_inner_mass")]
        inner_mass: f64,
    },
    SphereCap {
        #[serde(default = "default_inner_mass")]
        cap_mass: f64,
        #[serde(default = "default_cap_height")]
        cap_height: f64,
    },
    BallAnnulus {
        r: f64,
        outer_radius: f64,
        inner_mass: f64,
        dim: usize,
    },
    UnitCube {
        dim: usize,
    },
}

impl From<&DistributionSection> for DistributionSpec {
    fn from(d: &DistributionSection) -> Self {
        match *d {
            DistributionSection::OneDMixture { inner_mass } => {
                DistributionSpec::OneDMixture { inner_mass }
            }
            DistributionSection::SphereCap {
                cap_mass,
                cap_height,
            } => DistributionSpec::SphereCap {
                cap_mass,
                cap_height,
            },
            DistributionSection::BallAnnulus {
                r,
                outer_radius,
                inner_mass,
                dim,
            } => DistributionSpec::BallAnnulus {
                r,
                outer_radius,
                inner_mass,
                dim,
            },
            DistributionSection::UnitCube { dim } => DistributionSpec::UnitCube { dim },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub experiment: ExperimentSection,
    pub distribution: DistributionSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfigFile {
    /// The harness configuration, validated.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let e = &self.experiment;
        let cfg = ExperimentConfig {
            distribution: (&self.distribution).into(),
            m: e.m,
            p_values: e.p_values.clone(),
            betas: e.betas.clone(),
            reps: e.reps,
            n_test: e.n_test,
            base_seed: e.base_seed,
            input_noise_sigma: e.input_noise_sigma,
            noisy_test_inputs: e.noisy_test_inputs,
            tie_break: e.tie_break.into(),
        };
        cfg.validate().context("invalid experiment configuration")?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitsSection {
    pub neg: u8,
    pub pos: u8,
}

impl Default for DigitsSection {
    fn default() -> Self {
        DigitsSection { neg: 0, pos: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MnistExperimentSection {
    pub m: usize,
    pub p_values: Vec<f64>,
    pub betas: Vec<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_mnist_n_test")]
    pub n_test: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub tie_break: TieBreakKey,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MnistConfigFile {
    pub experiment: MnistExperimentSection,
    #[serde(default)]
    pub digits: DigitsSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl MnistConfigFile {
    pub fn sweep_config(&self) -> MnistSweepConfig {
        let e = &self.experiment;
        MnistSweepConfig {
            m: e.m,
            p_values: e.p_values.clone(),
            betas: e.betas.clone(),
            reps: e.reps,
            n_test: e.n_test,
            base_seed: e.base_seed,
            tie_break: e.tie_break.into(),
        }
    }
}

/// Parses JSON, reporting the key path of the first schema violation.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            anyhow::anyhow!("config: {inner}")
        } else {
            anyhow::anyhow!("config key `{path}`: {inner}")
        }
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    parse_json(&text).with_context(|| format!("in {}", path.display()))
}
