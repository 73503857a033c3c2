use std::fmt;
use std::str::FromStr;

use super::rates::RateTable;
use super::steady_state::PopulationVector;
use crate::error::{Error, Result};
use crate::reservoir::ReservoirLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Driven dressed master equation.
    Driven,
    /// Traditional dressed master equation (rates without the drive shift).
    Traditional,
    /// Floquet master equation.
    Floquet,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Driven, Method::Traditional, Method::Floquet];

    /// Short token used in configs and CSV output.
    pub fn token(self) -> &'static str {
        match self {
            Method::Driven => "dqme",
            Method::Traditional => "dme",
            Method::Floquet => "fme",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dqme" | "ddme" => Ok(Method::Driven),
            "dme" => Ok(Method::Traditional),
            "fme" => Ok(Method::Floquet),
            other => Err(Error::Validation(format!(
                "unknown method '{other}' (expected dqme, dme or fme)"
            ))),
        }
    }
}

/// Energy current into reservoir `mu`:
/// `sum over channels of frequency * (down * P_source - up * P_target)`.
pub fn energy_current(rt: &RateTable, p: &PopulationVector, mu: ReservoirLabel) -> f64 {
    rt.channels()
        .iter()
        .filter(|ch| ch.reservoir == mu)
        .filter(|ch| ch.down > 0.0 || ch.up > 0.0)
        .map(|ch| ch.frequency * (ch.down * p.get(ch.source) - ch.up * p.get(ch.target)))
        .sum()
}

/// Energy current into the drive: `-(j_left + j_right)`.
pub fn pump_current(j_left: f64, j_right: f64) -> f64 {
    -(j_left + j_right)
}

/// Steady-state energy currents into the left, right and drive terminals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurrentReport {
    pub method: Method,
    pub j_left: f64,
    pub j_right: f64,
    pub j_pump: f64,
}

impl CurrentReport {
    pub fn new(method: Method, j_left: f64, j_right: f64) -> Self {
        Self {
            method,
            j_left,
            j_right,
            j_pump: pump_current(j_left, j_right),
        }
    }

    pub fn from_table(method: Method, rt: &RateTable, p: &PopulationVector) -> Self {
        Self::new(
            method,
            energy_current(rt, p, ReservoirLabel::Left),
            energy_current(rt, p, ReservoirLabel::Right),
        )
    }

    pub fn get(&self, mu: ReservoirLabel) -> f64 {
        match mu {
            ReservoirLabel::Left => self.j_left,
            ReservoirLabel::Right => self.j_right,
        }
    }

    pub fn flows(&self) -> [f64; 3] {
        [self.j_left, self.j_right, self.j_pump]
    }

    pub fn max_abs(&self) -> f64 {
        self.flows().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `|j_l + j_r + j_p|`.
    pub fn conservation_error(&self) -> f64 {
        (self.j_left + self.j_right + self.j_pump).abs()
    }

    /// Largest flow difference relative to the larger of the two reports' scales.
    pub fn relative_distance(&self, other: &CurrentReport) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        self.flows()
            .iter()
            .zip(other.flows())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale
    }
}
