use crate::error::{Error, Result};
use crate::model::{DriveSpec, RotatedSystem};
use crate::operator::EigenSystem;
use crate::reservoir::{rate_down, rate_up, ReservoirLabel, Reservoirs};

/// One dissipative channel between two eigenstates for one reservoir.
///
/// Emission moves population `source -> target` at rate `down` and hands
/// `frequency` of energy to the reservoir; absorption runs the reverse
/// process at rate `up`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub reservoir: ReservoirLabel,
    pub target: usize,
    pub source: usize,
    /// Floquet sideband index; always 0 for dressed tables.
    pub sideband: i64,
    pub frequency: f64,
    /// Transition weight `|<target|A|source>|^2` (or `|sigma_m|^2` for Floquet).
    pub weight: f64,
    pub down: f64,
    pub up: f64,
}

impl Channel {
    pub fn new(
        reservoir: ReservoirLabel,
        target: usize,
        source: usize,
        sideband: i64,
        frequency: f64,
        weight: f64,
        reservoirs: &Reservoirs,
    ) -> Self {
        let r = reservoirs.get(reservoir);
        Self {
            reservoir,
            target,
            source,
            sideband,
            frequency,
            weight,
            down: rate_down(frequency, r) * weight,
            up: rate_up(frequency, r) * weight,
        }
    }
}

/// Incoherent transition rates over a set of basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    dim: usize,
    channels: Vec<Channel>,
}

impl RateTable {
    pub fn new(dim: usize, channels: Vec<Channel>) -> Result<Self> {
        for ch in &channels {
            if ch.target >= dim || ch.source >= dim {
                return Err(Error::IndexOutOfRange {
                    row: ch.target,
                    col: ch.source,
                    dim,
                });
            }
            if !(ch.down >= 0.0 && ch.up >= 0.0) {
                return Err(Error::Validation(format!("negative or NaN rate in {ch:?}")));
            }
        }
        Ok(Self { dim, channels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// First channel for `(reservoir, target, source)`.
    pub fn get(&self, reservoir: ReservoirLabel, target: usize, source: usize) -> Option<&Channel> {
        self.channels
            .iter()
            .find(|c| c.reservoir == reservoir && c.target == target && c.source == source)
    }

    /// Largest relative deviation of `up/down` from `exp(-frequency/T)` over
    /// channels with a nonzero emission rate.
    ///
    /// Absorption rates below the normal floating-point range carry no
    /// relative precision; such a channel counts as balanced when the
    /// expected rate is itself out of range, and as fully broken otherwise.
    pub fn detailed_balance_error(&self, reservoirs: &Reservoirs) -> f64 {
        self.channels
            .iter()
            .filter(|c| c.down > 0.0)
            .map(|c| {
                let log_boltzmann = -c.frequency / reservoirs.get(c.reservoir).temperature();
                if c.up < f64::MIN_POSITIVE {
                    let expected = c.down.ln() + log_boltzmann;
                    return if expected < f64::MIN_POSITIVE.ln() + 1e-12 { 0.0 } else { 1.0 };
                }
                ((c.up / c.down).ln() - log_boltzmann).exp_m1().abs()
            })
            .fold(0.0, f64::max)
    }
}

fn dressed_table(
    sys: &RotatedSystem,
    es: &EigenSystem,
    reservoirs: &Reservoirs,
    shift: f64,
) -> Result<RateTable> {
    let dim = es.dim();
    if sys.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: dim,
        });
    }
    let energies = es.energies();
    let mut channels = Vec::with_capacity(2 * dim * dim);
    for label in ReservoirLabel::ALL {
        let elements = es.to_eigenbasis(sys.coupling(label));
        for target in 0..dim {
            for source in 0..dim {
                let frequency = shift + (energies[source] - energies[target]);
                let weight = elements[(target, source)].norm_sqr();
                channels.push(Channel::new(
                    label, target, source, 0, frequency, weight, reservoirs,
                ));
            }
        }
    }
    RateTable::new(dim, channels)
}

/// Driven dressed rates: channel frequency `omega_d + E_source - E_target`.
///
/// Diagonal pairs are kept; they carry the bare `omega_d` channel.
pub fn build_rate_table(
    sys: &RotatedSystem,
    es: &EigenSystem,
    reservoirs: &Reservoirs,
    d: &DriveSpec,
) -> Result<RateTable> {
    dressed_table(sys, es, reservoirs, d.omega_d)
}

/// Traditional dressed rates: channel frequency `E_source - E_target`, no drive shift.
pub fn build_rate_table_traditional(
    sys: &RotatedSystem,
    es: &EigenSystem,
    reservoirs: &Reservoirs,
) -> Result<RateTable> {
    dressed_table(sys, es, reservoirs, 0.0)
}
