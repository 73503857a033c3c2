//! JSON sweep configuration.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "model": { "kind": "kerr", "chi": 0.4 },
//!   "drive": { "eta": 0.1 },
//!   "sweep": { "variable": "omega_d", "start": 0.3, "stop": 0.95, "points": 14 },
//!   "methods": ["dqme", "fme"]
//! }
//! ```
//!
//! Omitted reservoir and model parameters fall back to the common values
//! `alpha = 0.001`, `omega_c = 10`, `T_l = 1.2`, `T_r = 0.4`, `epsilon = 1`.

use std::fmt;
use std::path::PathBuf;

use dqme_core::floquet::FloquetControls;
use dqme_core::model::DEFAULT_KERR_N_MAX;
use dqme_core::{DriveSpec, Method, ModelSpec, Reservoir, ReservoirLabel, Reservoirs};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_ALPHA: f64 = 0.001;
pub const DEFAULT_OMEGA_C: f64 = 10.0;
pub const DEFAULT_T_LEFT: f64 = 1.2;
pub const DEFAULT_T_RIGHT: f64 = 0.4;
pub const DEFAULT_EPSILON: f64 = 1.0;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    model: RawModel,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    reservoirs: RawReservoirs,
    sweep: RawSweep,
    methods: Vec<String>,
    #[serde(default)]
    floquet: Option<RawFloquet>,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawModel {
    Nesb {
        epsilon: Option<f64>,
    },
    CoupledSpins {
        epsilon_l: Option<f64>,
        epsilon_r: Option<f64>,
        hopping: f64,
    },
    Kerr {
        epsilon: Option<f64>,
        chi: Option<f64>,
        n_max: Option<usize>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    eta: Option<f64>,
    omega_d: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReservoirs {
    #[serde(default)]
    left: RawReservoir,
    #[serde(default)]
    right: RawReservoir,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReservoir {
    temperature: Option<f64>,
    alpha: Option<f64>,
    omega_c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: SweepVariable,
    start: f64,
    stop: f64,
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFloquet {
    n_steps: Option<usize>,
    n_t: Option<usize>,
    m_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    OmegaD,
    Eta,
    Chi,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::OmegaD => "omega_d",
            SweepVariable::Eta => "eta",
            SweepVariable::Chi => "chi",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    /// Evenly spaced values from `start` to `stop`, both included.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Fully validated sweep description.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: ModelSpec,
    /// Base drive; the swept component is overwritten per point.
    pub drive: DriveSpec,
    pub reservoirs: Reservoirs,
    pub sweep: Sweep,
    pub methods: Vec<Method>,
    pub floquet: FloquetControls,
    pub output: Option<PathBuf>,
}

/// One parameter point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub model: ModelSpec,
    pub drive: DriveSpec,
}

impl SweepConfig {
    pub fn points(&self) -> Vec<SweepPoint> {
        self.sweep
            .values()
            .into_iter()
            .map(|value| {
                let mut model = self.model;
                let mut drive = self.drive;
                match self.sweep.variable {
                    SweepVariable::OmegaD => drive.omega_d = value,
                    SweepVariable::Eta => drive.eta = value,
                    SweepVariable::Chi => {
                        if let ModelSpec::Kerr { chi, .. } = &mut model {
                            *chi = value;
                        }
                    }
                }
                SweepPoint { value, model, drive }
            })
            .collect()
    }
}

fn config_error(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn require(value: Option<f64>, key: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| config_error(key, "missing (only the swept parameter may be omitted)"))
}

fn reservoir(raw: &RawReservoir, label: ReservoirLabel, t_default: f64) -> Result<Reservoir, CliError> {
    let key = match label {
        ReservoirLabel::Left => "reservoirs.left",
        ReservoirLabel::Right => "reservoirs.right",
    };
    Reservoir::new(
        label,
        raw.temperature.unwrap_or(t_default),
        raw.alpha.unwrap_or(DEFAULT_ALPHA),
        raw.omega_c.unwrap_or(DEFAULT_OMEGA_C),
    )
    .map_err(|e| config_error(key, e))
}

/// Parses and validates a JSON config; errors name the offending key.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            config_error(&path, inner)
        }
    })?;

    if raw.schema_version != SCHEMA_VERSION {
        return Err(config_error(
            "schema_version",
            format!("unsupported version {} (expected {SCHEMA_VERSION})", raw.schema_version),
        ));
    }

    let sweep = Sweep {
        variable: raw.sweep.variable,
        start: raw.sweep.start,
        stop: raw.sweep.stop,
        points: raw.sweep.points,
    };
    if !(sweep.start.is_finite() && sweep.stop.is_finite() && sweep.start < sweep.stop) {
        return Err(config_error("sweep.start", "must be finite and below sweep.stop"));
    }
    if sweep.points < 2 {
        return Err(config_error("sweep.points", "at least 2 points are required"));
    }
    let swept = |v: SweepVariable| sweep.variable == v;

    let model = match raw.model {
        RawModel::Nesb { epsilon } => ModelSpec::Nesb {
            epsilon: epsilon.unwrap_or(DEFAULT_EPSILON),
        },
        RawModel::CoupledSpins {
            epsilon_l,
            epsilon_r,
            hopping,
        } => ModelSpec::CoupledSpins {
            epsilon_l: epsilon_l.unwrap_or(DEFAULT_EPSILON),
            epsilon_r: epsilon_r.unwrap_or(DEFAULT_EPSILON),
            hopping,
        },
        RawModel::Kerr { epsilon, chi, n_max } => ModelSpec::Kerr {
            epsilon: epsilon.unwrap_or(DEFAULT_EPSILON),
            chi: if swept(SweepVariable::Chi) {
                chi.unwrap_or(sweep.start)
            } else {
                require(chi, "model.chi")?
            },
            n_max: n_max.unwrap_or(DEFAULT_KERR_N_MAX),
        },
    };
    if swept(SweepVariable::Chi) && !matches!(model, ModelSpec::Kerr { .. }) {
        return Err(config_error(
            "sweep.variable",
            format!("chi can only be swept for the kerr model, not {}", model.name()),
        ));
    }
    model.validate().map_err(|e| config_error("model", e))?;

    let drive = DriveSpec {
        eta: if swept(SweepVariable::Eta) {
            raw.drive.eta.unwrap_or(sweep.start)
        } else {
            require(raw.drive.eta, "drive.eta")?
        },
        omega_d: if swept(SweepVariable::OmegaD) {
            raw.drive.omega_d.unwrap_or(sweep.start)
        } else {
            require(raw.drive.omega_d, "drive.omega_d")?
        },
    };
    drive.validate().map_err(|e| config_error("drive", e))?;
    if sweep.start < 0.0 {
        return Err(config_error("sweep.start", "swept parameters must be non-negative"));
    }

    let reservoirs = Reservoirs::new(
        reservoir(&raw.reservoirs.left, ReservoirLabel::Left, DEFAULT_T_LEFT)?,
        reservoir(&raw.reservoirs.right, ReservoirLabel::Right, DEFAULT_T_RIGHT)?,
    )
    .map_err(|e| config_error("reservoirs", e))?;

    let methods = raw
        .methods
        .iter()
        .enumerate()
        .map(|(i, s)| s.parse::<Method>().map_err(|e| config_error(&format!("methods[{i}]"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    let methods = normalize_methods(methods).map_err(|e| config_error("methods", e))?;

    let defaults = FloquetControls::default();
    let floquet = match raw.floquet {
        None => defaults,
        Some(f) => FloquetControls {
            n_steps: f.n_steps.unwrap_or(defaults.n_steps),
            n_t: f.n_t.unwrap_or(defaults.n_t),
            m_max: f.m_max.unwrap_or(defaults.m_max),
            integrator: defaults.integrator,
        },
    };
    floquet.validate().map_err(|e| config_error("floquet", e))?;

    Ok(SweepConfig {
        model,
        drive,
        reservoirs,
        sweep,
        methods,
        floquet,
        output: raw.output,
    })
}

/// Sorted, deduplicated, non-empty.
pub fn normalize_methods(mut methods: Vec<Method>) -> Result<Vec<Method>, String> {
    if methods.is_empty() {
        return Err("at least one method is required".into());
    }
    methods.sort();
    methods.dedup();
    Ok(methods)
}
