//! JSON configuration files.
//!
//! ```json
//! {
//!   "n_beams": 3,
//!   "populations": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
//!   "detector": { "bloch_vectors": [[0, 0, 1], [1, 0, 0], [-1, 0, 0]] },
//!   "measurement": { "beta": "pi/2", "gamma": 0 }
//! }
//! ```
//!
//! `detector` takes either `bloch_vectors` (qubit detectors) or `amplitudes`,
//! one list of `[re, im]` pairs per beam. `measurement` is optional and is
//! either `{beta, gamma}` or `{projectors: [...]}` with each projector given
//! as rows of `[re, im]` pairs. Angles are numbers in radians or strings
//! such as `"2pi/3"`.

use std::fmt;

use duality_core::distinguishability::{observable_to_measurement, TwoOutcomeObservable};
use duality_core::measures::Measurement;
use duality_core::qcore::{BeamDetectorConfig, BlochVector, DetectorState, PopulationVector};
use duality_core::DualityError;
use serde::Deserialize;

use crate::angle::parse_angle;

type Complex64 = num_complex::Complex64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_beams: usize,
    populations: Vec<f64>,
    detector: RawDetector,
    #[serde(default)]
    measurement: Option<RawMeasurement>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    #[serde(default)]
    bloch_vectors: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    amplitudes: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAngle {
    Radians(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RawMeasurement {
    Angles { beta: RawAngle, gamma: RawAngle },
    Projectors { projectors: Vec<Vec<Vec<[f64; 2]>>> },
}

/// A parse or validation failure, located at a line of the source when
/// possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Where the detector observable comes from, if the file names one.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfiguredMeasurement {
    Observable(TwoOutcomeObservable),
    Projectors(Measurement),
}

impl ConfiguredMeasurement {
    pub fn measurement(&self) -> Measurement {
        match self {
            ConfiguredMeasurement::Observable(obs) => observable_to_measurement(obs),
            ConfiguredMeasurement::Projectors(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: BeamDetectorConfig,
    pub measurement: Option<ConfiguredMeasurement>,
}

fn line_of(source: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    source
        .lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

fn at(source: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: line_of(source, key),
        message: message.into(),
    }
}

fn core_err(source: &str, key: &str, e: DualityError) -> ConfigError {
    at(source, key, format!("`{key}`: {e}"))
}

fn angle(source: &str, raw: &RawAngle) -> Result<f64, ConfigError> {
    match raw {
        RawAngle::Radians(x) => Ok(*x),
        RawAngle::Text(t) => parse_angle(t).map_err(|e| at(source, "measurement", e)),
    }
}

fn complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

pub fn parse_config(source: &str) -> Result<LoadedConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(source).map_err(|e| ConfigError {
        line: Some(e.line()),
        message: e.to_string(),
    })?;

    if raw.populations.len() != raw.n_beams {
        return Err(at(
            source,
            "n_beams",
            format!(
                "n_beams is {} but {} populations are given",
                raw.n_beams,
                raw.populations.len()
            ),
        ));
    }
    if raw.n_beams < 2 {
        return Err(at(source, "n_beams", "at least two beams are required"));
    }
    let populations =
        PopulationVector::new(raw.populations).map_err(|e| core_err(source, "populations", e))?;

    let states = match (raw.detector.bloch_vectors, raw.detector.amplitudes) {
        (Some(vs), None) => vs
            .iter()
            .map(|[x, y, z]| BlochVector::new(*x, *y, *z).map(|v| duality_core::qcore::bloch_to_state(&v)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| core_err(source, "bloch_vectors", e))?,
        (None, Some(amps)) => amps
            .iter()
            .map(|a| DetectorState::new(complex(a)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| core_err(source, "amplitudes", e))?,
        _ => {
            return Err(at(
                source,
                "detector",
                "detector needs exactly one of `bloch_vectors` or `amplitudes`",
            ))
        }
    };
    if states.len() != raw.n_beams {
        return Err(at(
            source,
            "detector",
            format!("{} detector states for {} beams", states.len(), raw.n_beams),
        ));
    }
    let config = BeamDetectorConfig::new(populations, states).map_err(|e| core_err(source, "detector", e))?;

    let measurement = match raw.measurement {
        None => None,
        Some(RawMeasurement::Angles { beta, gamma }) => {
            if config.detector_dim() != 2 {
                return Err(at(
                    source,
                    "measurement",
                    "`beta`/`gamma` observables need a two-dimensional detector",
                ));
            }
            let gamma = angle(source, &gamma)?.rem_euclid(2.0 * std::f64::consts::PI);
            let obs = TwoOutcomeObservable::new(angle(source, &beta)?, gamma)
                .map_err(|e| core_err(source, "measurement", e))?;
            Some(ConfiguredMeasurement::Observable(obs))
        }
        Some(RawMeasurement::Projectors { projectors }) => {
            let d = config.detector_dim();
            let mut mats = Vec::with_capacity(projectors.len());
            for rows in &projectors {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(at(
                        source,
                        "projectors",
                        format!("each projector must be {d}×{d} to match the detector"),
                    ));
                }
                let entries: Vec<Complex64> = rows.iter().flat_map(|r| complex(r)).collect();
                mats.push(nalgebra::DMatrix::from_row_slice(d, d, &entries));
            }
            let m = Measurement::unlabeled(mats).map_err(|e| core_err(source, "projectors", e))?;
            Some(ConfiguredMeasurement::Projectors(m))
        }
    };

    Ok(LoadedConfig {
        config,
        measurement,
    })
}
