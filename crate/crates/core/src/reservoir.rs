//! Ohmic bosonic reservoirs and the elementary emission/absorption kernels.
//!
//! The spectral density carries a Heaviside factor with `theta(0) = 0`, so
//! both kernels vanish identically for `omega <= 0`. For `omega > 0`
//!
//! ```text
//! rate_down(w) = gamma(w) [1 + n(w)] = pi alpha e^{-w/wc} w / (1 - e^{-w/T})
//! rate_up(w)   = gamma(w) n(w)       = rate_down(w) e^{-w/T}
//! ```
//!
//! evaluated in that fused form so neither `n` near zero nor `gamma` at large
//! frequency overflows.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReservoirLabel {
    Left,
    Right,
}

impl ReservoirLabel {
    pub const ALL: [ReservoirLabel; 2] = [ReservoirLabel::Left, ReservoirLabel::Right];

    pub fn index(self) -> usize {
        match self {
            ReservoirLabel::Left => 0,
            ReservoirLabel::Right => 1,
        }
    }
}

impl fmt::Display for ReservoirLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReservoirLabel::Left => "left",
            ReservoirLabel::Right => "right",
        })
    }
}

/// Thermal Ohmic reservoir: `k_B T`, dissipation strength `alpha`, cutoff `omega_c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reservoir {
    label: ReservoirLabel,
    temperature: f64,
    alpha: f64,
    omega_c: f64,
}

impl Reservoir {
    pub fn new(label: ReservoirLabel, temperature: f64, alpha: f64, omega_c: f64) -> Result<Self> {
        for (name, value) in [
            ("temperature", temperature),
            ("alpha", alpha),
            ("omega_c", omega_c),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Validation(format!(
                    "{label} reservoir {name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(Self {
            label,
            temperature,
            alpha,
            omega_c,
        })
    }

    pub fn label(&self) -> ReservoirLabel {
        self.label
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
}

/// The left and right reservoirs of a two-terminal setup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reservoirs {
    pub left: Reservoir,
    pub right: Reservoir,
}

impl Reservoirs {
    pub fn new(left: Reservoir, right: Reservoir) -> Result<Self> {
        if left.label != ReservoirLabel::Left || right.label != ReservoirLabel::Right {
            return Err(Error::Validation(
                "reservoir pair must be labelled (left, right)".into(),
            ));
        }
        Ok(Self { left, right })
    }

    /// Both reservoirs share `alpha` and `omega_c`; only temperatures differ.
    pub fn symmetric(t_left: f64, t_right: f64, alpha: f64, omega_c: f64) -> Result<Self> {
        Self::new(
            Reservoir::new(ReservoirLabel::Left, t_left, alpha, omega_c)?,
            Reservoir::new(ReservoirLabel::Right, t_right, alpha, omega_c)?,
        )
    }

    pub fn get(&self, label: ReservoirLabel) -> &Reservoir {
        match label {
            ReservoirLabel::Left => &self.left,
            ReservoirLabel::Right => &self.right,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Reservoir> {
        [&self.left, &self.right].into_iter()
    }
}

/// `gamma(w) = pi alpha theta(w) w e^{-w/omega_c}`.
pub fn ohmic_spectral_density(omega: f64, r: &Reservoir) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    PI * r.alpha * omega * (-omega / r.omega_c).exp()
}

/// Bose-Einstein occupation `1 / (e^{w/T} - 1)`; only defined for `w > 0`.
pub fn bose_occupation(omega: f64, r: &Reservoir) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain {
            what: "bose_occupation",
            omega,
        });
    }
    Ok(1.0 / (omega / r.temperature).exp_m1())
}

/// `w / (1 - e^{-w/T})`, i.e. `w [1 + n(w)]`, for `w > 0`.
#[inline]
fn emission_factor(omega: f64, temperature: f64) -> f64 {
    omega / -(-omega / temperature).exp_m1()
}

/// Emission kernel `gamma(w) [1 + n(w)]`, zero for `w <= 0`.
pub fn rate_down(omega: f64, r: &Reservoir) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    PI * r.alpha * (-omega / r.omega_c).exp() * emission_factor(omega, r.temperature)
}

/// Absorption kernel `gamma(w) n(w)`, zero for `w <= 0`.
pub fn rate_up(omega: f64, r: &Reservoir) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    rate_down(omega, r) * (-omega / r.temperature).exp()
}
