//! Trial schema configuration: which arm is the control, the dose-arm
//! order, and the outcome order and benefit directions. Accepted as TOML or
//! JSON.

use std::fs;
use std::path::Path;

use lrst_core::{Direction, OutcomeSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaConfig {
    pub control: String,
    pub doses: Vec<String>,
    pub outcomes: Vec<OutcomeConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeConfig {
    pub name: String,
    pub direction: DirectionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    HigherIsBetter,
    HigherIsWorse,
}

impl From<DirectionConfig> for Direction {
    fn from(d: DirectionConfig) -> Direction {
        match d {
            DirectionConfig::HigherIsBetter => Direction::HigherIsBetter,
            DirectionConfig::HigherIsWorse => Direction::HigherIsWorse,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("cannot read schema file: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("schema parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema needs at least one dose arm")]
    NoDoses,
    #[error("schema needs at least one outcome")]
    NoOutcomes,
    #[error("duplicate arm label '{0}' in schema")]
    DuplicateArm(String),
    #[error("duplicate outcome '{0}' in schema")]
    DuplicateOutcome(String),
}

impl SchemaConfig {
    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.doses.is_empty() {
            return Err(SchemaError::NoDoses);
        }
        if self.outcomes.is_empty() {
            return Err(SchemaError::NoOutcomes);
        }
        for (i, d) in self.doses.iter().enumerate() {
            if *d == self.control || self.doses[..i].contains(d) {
                return Err(SchemaError::DuplicateArm(d.clone()));
            }
        }
        for (i, o) in self.outcomes.iter().enumerate() {
            if self.outcomes[..i].iter().any(|p| p.name == o.name) {
                return Err(SchemaError::DuplicateOutcome(o.name.clone()));
            }
        }
        Ok(())
    }

    pub fn outcome_specs(&self) -> Vec<OutcomeSpec> {
        self.outcomes
            .iter()
            .map(|o| OutcomeSpec {
                name: o.name.clone(),
                direction: o.direction.into(),
            })
            .collect()
    }

    pub fn outcome_names(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.name.clone()).collect()
    }
}

/// Load a schema from TOML (default) or JSON (by file extension).
pub fn load_schema(path: &Path) -> Result<SchemaConfig, SchemaError> {
    let text = fs::read_to_string(path)?;
    let config: SchemaConfig = if path.extension().and_then(|e| e.to_str()) == Some("json") {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text)?
    };
    config.validate()?;
    Ok(config)
}
