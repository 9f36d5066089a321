//! Run configuration: one TOML file carrying every physical section plus the
//! seed and output preferences. Unknown keys are rejected so stale configs
//! fail loudly instead of silently drifting.

use drum_core::{FieldConfig, RotationState, SensorConfig, SequenceParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed for every stochastic operation.
    #[serde(default)]
    pub rng_seed: u64,
    /// Output path stem; commands append their own suffix and extension.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutFormat,
    pub sensor: SensorConfig,
    pub rotation: RotationState,
    pub fields: FieldConfig,
    pub sequence: SequenceParams,
}

impl Default for RunConfig {
    /// Demonstration operating point: 3.75 kHz rotation, τ = 180 µs at the
    /// first revival with B_z = 0.7 mT.
    fn default() -> Self {
        Self {
            rng_seed: 0,
            output: None,
            format: OutFormat::Csv,
            sensor: SensorConfig::default(),
            rotation: RotationState::default(),
            fields: FieldConfig {
                b_z: 0.7e-3,
                ..FieldConfig::default()
            },
            sequence: SequenceParams::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.sensor
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        self.rotation
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        self.fields
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        self.sequence
            .validate(Some(&self.rotation))
            .map_err(CliError::Validation)?;
        for warning in self.fields.weak_field_warnings() {
            eprintln!("warning: {warning}");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let config = RunConfig::default();
        let text = config.to_toml();
        let parsed: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = RunConfig::default().to_toml();
        text.push_str("\nturbo_mode = true\n");
        let err = toml::from_str::<RunConfig>(&text).unwrap_err().to_string();
        assert!(err.contains("turbo_mode"), "{err}");
    }

    #[test]
    fn missing_section_names_the_key() {
        let err = toml::from_str::<RunConfig>("rng_seed = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("sensor"), "{err}");
    }
}
