//! Scenario files and the named figure presets.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! name = "fig4"
//!
//! [params]
//! xi_x = 10.0
//! xi_y = 10.0
//! r = 1.0
//! R = 0.2
//! mu = 1.0
//! d_prime = 3.0
//!
//! [params.pointer]
//! mode = "single"
//! xi = 10.0
//! n = 1
//!
//! [ensemble]
//! per_slit = 9
//! extent = 0.8
//! backend = "full-analytic"
//!
//! [ensemble.z_init]
//! kind = "common"
//! value = 0.0
//! ```
//!
//! `[integrator]` and `[outputs]` are optional. Unknown keys are errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{Backend, EnsembleSpec, IntegratorOptions, ZInit};
use crate::model::{Pointer, ScenarioParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used by presets whose pointer positions are drawn at random.
pub const PRESET_SEED: u64 = 1;

pub const PRESET_NAMES: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5", "fig5-text", "fig6", "fig7", "fig8", "fig9", "fig10",
    "fig11", "fig12",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub formats: Vec<OutputFormat>,
    /// Run directory; the CLI falls back to `runs/<name>`.
    pub dir: Option<PathBuf>,
    /// Write every k-th integrator sample (the last sample is always written).
    pub every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
            dir: None,
            every: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub params: ScenarioParams,
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub integrator: IntegratorOptions,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.outputs.every == 0 {
            return Err(Error::InvalidInput("outputs.every must be >= 1".into()));
        }
        self.params.validate()?;
        self.ensemble.validate()?;
        self.integrator.validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }

    /// Replaces the pointer particle count, keeping the rest of the scenario.
    pub fn with_n(mut self, n: usize) -> Result<Self> {
        self.params = self.params.with_n_particles(n)?;
        if let ZInit::Explicit { values } = &self.ensemble.z_init {
            if values.len() != n {
                let common = values.first().copied().unwrap_or(0.0);
                if values.iter().any(|&v| v != common) {
                    return Err(Error::InvalidInput(format!(
                        "cannot resize {} explicit pointer positions to N={n}",
                        values.len()
                    )));
                }
                self.ensemble.z_init = ZInit::Common { value: common };
            }
        }
        Ok(self)
    }
}

fn base_params(big_r: f64, xi: f64, n: usize) -> ScenarioParams {
    ScenarioParams::new(10.0, 10.0, 1.0, big_r, 1.0, 3.0, Pointer::Single { xi, n })
        .expect("preset parameters are valid")
}

fn scenario(
    name: &str,
    description: &str,
    params: ScenarioParams,
    z_init: ZInit,
    backend: Backend,
) -> ScenarioFile {
    ScenarioFile {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        description: Some(description.into()),
        params,
        ensemble: EnsembleSpec::new(z_init, backend),
        integrator: IntegratorOptions::default(),
        outputs: OutputSpec::default(),
    }
}

/// The canonical scenario behind each figure.
pub fn preset(name: &str) -> Result<ScenarioFile> {
    let common = |v: f64| ZInit::Common { value: v };
    let shifted = |s: f64| ZInit::GaussianShifted {
        sigma_hat: s,
        seed: PRESET_SEED,
    };
    let two_pointer = |z1: f64, z2: f64, name: &str, description: &str| {
        let mut s = scenario(
            name,
            description,
            ScenarioParams {
                pointer: Pointer::two_pointer(10.0),
                ..base_params(0.2, 10.0, 1)
            },
            ZInit::Explicit {
                values: vec![z1, z2],
            },
            Backend::FullAnalytic,
        );
        s.ensemble.per_slit = 1;
        s
    };
    let many = |n: usize, sigma: f64, name: &str, description: &str| {
        scenario(
            name,
            description,
            base_params(0.2, 10.0, n),
            shifted(sigma),
            Backend::Reduced,
        )
    };
    let s = match name {
        "fig2" => scenario(
            name,
            "no pointer coupling: every trajectory bounces on the symmetry plane",
            base_params(1.0, 0.0, 1),
            common(0.0),
            Backend::FullAnalytic,
        ),
        "fig3" => scenario(
            name,
            "fast pointer (E = 3): straight trajectories",
            base_params(1.0, 10.0, 1),
            common(0.0),
            Backend::FullAnalytic,
        ),
        "fig4" => scenario(
            name,
            "slow pointer (E = 0.12), Z'0 = 0",
            base_params(0.2, 10.0, 1),
            common(0.0),
            Backend::FullAnalytic,
        ),
        "fig5" | "fig6" => scenario(
            name,
            "slow pointer, Z'0 = 0.3",
            base_params(0.2, 10.0, 1),
            common(0.3),
            Backend::FullAnalytic,
        ),
        "fig5-text" => scenario(
            name,
            "slow pointer, Z'0 = 0.5",
            base_params(0.2, 10.0, 1),
            common(0.5),
            Backend::FullAnalytic,
        ),
        "fig7" => two_pointer(0.01, 0.01, name, "two one-particle pointers, Z'1,0 = Z'2,0 = 0.01"),
        "fig8" => two_pointer(0.5, 0.9, name, "two one-particle pointers, Z'1,0 = 0.5, Z'2,0 = 0.9"),
        "fig9" => many(10, 0.0, name, "N = 10 pointer particles, Σ̂'(0) = 0"),
        "fig10" => many(10, 0.3, name, "N = 10 pointer particles, Σ̂'(0) = 0.3"),
        "fig11" => many(10, 1.0, name, "N = 10 pointer particles, Σ̂'(0) = 1"),
        "fig12" => many(200, 0.3, name, "N = 200 pointer particles, Σ̂'(0) = 0.3"),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(s)
}
