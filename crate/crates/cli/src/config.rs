//! Flat JSON experiment configs, one struct per subcommand.

use std::f64::consts::PI;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use qsl_core::bounds::SweepConfig;
use qsl_core::evolution::Frame;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    RefuteMl,
    BdGap,
    Trajectory,
    AlphaTable,
    ValiditySweep,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::RefuteMl => "refute-ml",
            Kind::BdGap => "bd-gap",
            Kind::Trajectory => "trajectory",
            Kind::AlphaTable => "alpha-table",
            Kind::ValiditySweep => "validity-sweep",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefuteMlConfig {
    pub delta: f64,
    #[serde(rename = "L")]
    pub numerator: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    /// Explicit angle; when absent it is chosen from `margin`.
    pub theta: Option<f64>,
    pub margin: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub output: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BdGapConfig {
    /// Diagonal of `H`. When absent, `H` and the state are drawn from `dim` and `seed`.
    pub energies: Option<Vec<f64>>,
    /// Real parts of the initial amplitudes, in the eigenbasis of `energies`.
    pub amplitudes: Option<Vec<f64>>,
    /// Optional phase (radians) of each amplitude.
    pub phases: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default = "default_radius")]
    pub spectral_radius: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub output: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    #[serde(rename = "E", default = "default_energy")]
    pub energy: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Bloch polar angle of the initial state, measured from the x axis.
    #[serde(default = "default_polar")]
    pub polar: f64,
    #[serde(default)]
    pub azimuth: f64,
    /// Defaults to one full precession in the rotating frame.
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_frame")]
    pub frame: Frame,
    pub occupation_tol: Option<f64>,
    pub output: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaTableConfig {
    #[serde(default)]
    pub delta_min: f64,
    #[serde(default = "one")]
    pub delta_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    pub output: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValiditySweepConfig {
    pub systems: Option<usize>,
    pub seed: Option<u64>,
    pub dim_min: Option<usize>,
    pub dim_max: Option<usize>,
    pub spectral_radius: Option<f64>,
    pub deltas: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub output: Option<String>,
    pub format: Option<Format>,
}

impl ValiditySweepConfig {
    pub fn to_sweep(&self) -> SweepConfig {
        let d = SweepConfig::default();
        SweepConfig {
            systems: self.systems.unwrap_or(d.systems),
            seed: self.seed.unwrap_or(d.seed),
            dim_min: self.dim_min.unwrap_or(d.dim_min),
            dim_max: self.dim_max.unwrap_or(d.dim_max),
            spectral_radius: self.spectral_radius.unwrap_or(d.spectral_radius),
            deltas: self.deltas.clone().unwrap_or(d.deltas),
            samples: self.samples.unwrap_or(d.samples),
        }
    }
}

fn default_samples() -> usize {
    1000
}

fn default_radius() -> f64 {
    5.0
}

fn default_energy() -> f64 {
    1.0
}

fn default_theta() -> f64 {
    PI / 6.0
}

fn default_polar() -> f64 {
    qsl_core::counterexamples::DEFAULT_CIRCLE_POLAR
}

fn default_frame() -> Frame {
    Frame::Rotating
}

fn one() -> f64 {
    1.0
}

fn default_points() -> usize {
    101
}

/// Parses `text`, checks that its `kind` matches `kind` and decodes the rest.
pub fn parse<T: DeserializeOwned>(text: &str, kind: Kind) -> Result<T, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    match object.remove("kind") {
        Some(Value::String(k)) if k == kind.name() => {}
        Some(other) => {
            return Err(CliError::Config(format!(
                "config kind {other} does not match subcommand {}",
                kind.name()
            )))
        }
        None => return Err(CliError::Config("config is missing the \"kind\" field".into())),
    }
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

/// Seed from `QSL_SEED` if set, else from the config.
pub fn seed_override(config_seed: Option<u64>) -> Result<Option<u64>, CliError> {
    match std::env::var("QSL_SEED") {
        Ok(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("QSL_SEED must be an unsigned integer, got {text:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(config_seed),
        Err(e) => Err(CliError::Config(format!("QSL_SEED: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_must_match() {
        let text = r#"{"kind": "bd-gap", "delta": 0.0}"#;
        assert!(parse::<BdGapConfig>(text, Kind::BdGap).is_ok());
        assert!(matches!(
            parse::<AlphaTableConfig>(text, Kind::AlphaTable),
            Err(CliError::Config(_))
        ));
        assert!(parse::<AlphaTableConfig>(r#"{"points": 3}"#, Kind::AlphaTable).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"kind": "alpha-table", "points": 3, "pionts": 4}"#;
        let err = parse::<AlphaTableConfig>(text, Kind::AlphaTable).unwrap_err();
        assert!(err.to_string().contains("pionts"));
    }

    #[test]
    fn defaults_fill_in() {
        let c: TrajectoryConfig = parse(r#"{"kind": "trajectory"}"#, Kind::Trajectory).unwrap();
        assert_eq!(c.energy, 1.0);
        assert_eq!(c.frame, Frame::Rotating);
        assert_eq!(c.samples, 1000);
        let c: RefuteMlConfig = parse(r#"{"kind": "refute-ml", "delta": 0, "L": 1, "E": 2}"#, Kind::RefuteMl).unwrap();
        assert_eq!((c.numerator, c.energy), (1.0, 2.0));
        assert!(c.theta.is_none());
    }
}
