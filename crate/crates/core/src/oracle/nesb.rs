use crate::dqme::{CurrentReport, Method, PopulationVector};
use crate::error::{Error, Result};
use crate::model::{DriveSpec, ModelSpec};
use crate::reservoir::{rate_down, rate_up, ReservoirLabel, Reservoirs};

/// Emission and absorption kernels of one reservoir at one channel frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelRates {
    pub frequency: f64,
    pub down: f64,
    pub up: f64,
}

impl ChannelRates {
    fn at(frequency: f64, reservoirs: &Reservoirs, mu: ReservoirLabel) -> Self {
        let r = reservoirs.get(mu);
        Self {
            frequency,
            down: rate_down(frequency, r),
            up: rate_up(frequency, r),
        }
    }

    /// Energy flow into the reservoir for one weighted channel.
    fn flow(&self, weight: f64, p_source: f64, p_target: f64) -> f64 {
        self.frequency * weight * (self.down * p_source - self.up * p_target)
    }
}

/// Rates of one reservoir on the three NESB channels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NesbChannels {
    /// `omega_d + lambda`, connecting `phi_+ -> phi_-` on emission.
    pub upper: ChannelRates,
    /// `omega_d - lambda`, connecting `phi_- -> phi_+` on emission.
    pub lower: ChannelRates,
    /// `omega_d`, no population transfer.
    pub center: ChannelRates,
}

/// Closed-form dressed solution of the driven two-level system.
///
/// Eigenstates are ordered as in the numerical pipeline: index 0 is `phi_-`,
/// index 1 is `phi_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct NesbAnalytic {
    pub delta: f64,
    pub theta: f64,
    pub lambda: f64,
    pub omega_d: f64,
    pub channels: [NesbChannels; 2],
    pub populations: PopulationVector,
}

/// Mixing angle with `tan(theta) = eta / delta`.
///
/// `atan2` gives `pi/2` at `delta = 0` and `0` for `eta = 0`, `delta >= 0`.
/// For `delta < 0` it continues past `pi/2` so that `phi_+` stays the upper state.
pub fn mixing_angle(delta: f64, eta: f64) -> f64 {
    f64::atan2(eta, delta)
}

impl NesbAnalytic {
    pub fn new(m: &ModelSpec, d: &DriveSpec, reservoirs: &Reservoirs) -> Result<Self> {
        let ModelSpec::Nesb { epsilon } = *m else {
            return Err(Error::Validation(format!(
                "closed form exists only for the nesb model, got {}",
                m.name()
            )));
        };
        m.validate()?;
        d.validate()?;
        let delta = epsilon - d.omega_d;
        let theta = mixing_angle(delta, d.eta);
        let lambda = delta.hypot(d.eta);
        let channels = ReservoirLabel::ALL.map(|mu| NesbChannels {
            upper: ChannelRates::at(d.omega_d + lambda, reservoirs, mu),
            lower: ChannelRates::at(d.omega_d - lambda, reservoirs, mu),
            center: ChannelRates::at(d.omega_d, reservoirs, mu),
        });
        let mut s = Self {
            delta,
            theta,
            lambda,
            omega_d: d.omega_d,
            channels,
            populations: PopulationVector::new(vec![1.0, 0.0])?,
        };
        let (feed, drain) = s.collective_rates();
        s.populations = two_level_balance(feed, drain)?;
        Ok(s)
    }

    /// `(cos^4(theta/2), sin^4(theta/2), sin^2(theta)/4)`.
    pub fn weights(&self) -> (f64, f64, f64) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let sc = s * c;
        (c.powi(4), s.powi(4), sc * sc)
    }

    /// Total rates into and out of `phi_+`, summed over both reservoirs.
    ///
    /// `phi_+` is fed by absorption on the upper channel and by emission on
    /// the lower one; the lower channel raises the dressed state while handing
    /// energy to the bath because the drive supplies `omega_d`.
    pub fn collective_rates(&self) -> (f64, f64) {
        let (wu, wl, _) = self.weights();
        self.channels.iter().fold((0.0, 0.0), |(feed, drain), ch| {
            (
                feed + wu * ch.upper.up + wl * ch.lower.down,
                drain + wu * ch.upper.down + wl * ch.lower.up,
            )
        })
    }

    pub fn p_minus(&self) -> f64 {
        self.populations.get(0)
    }

    pub fn p_plus(&self) -> f64 {
        self.populations.get(1)
    }

    pub fn current(&self, mu: ReservoirLabel) -> f64 {
        let (wu, wl, wc) = self.weights();
        let ch = &self.channels[mu.index()];
        let (pm, pp) = (self.p_minus(), self.p_plus());
        ch.upper.flow(wu, pp, pm) + ch.lower.flow(wl, pm, pp) + ch.center.flow(wc, 1.0, 1.0)
    }

    pub fn report(&self) -> CurrentReport {
        CurrentReport::new(
            Method::Driven,
            self.current(ReservoirLabel::Left),
            self.current(ReservoirLabel::Right),
        )
    }
}

pub fn nesb_analytic_currents(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
) -> Result<CurrentReport> {
    Ok(NesbAnalytic::new(m, d, reservoirs)?.report())
}

/// Near-resonance limit `J_mu -> 2 omega_d [Gamma^mu_-(omega_d) - Gamma^mu_+(omega_d)]`,
/// where the central-channel rates carry their weight `sin^2(theta)/4`. Valid
/// for `omega_d` close to `epsilon` with `omega_d >> lambda`; exact in the
/// limit `eta -> 0` at `omega_d = epsilon`.
pub fn near_resonance_current(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    mu: ReservoirLabel,
) -> Result<f64> {
    let a = NesbAnalytic::new(m, d, reservoirs)?;
    let (_, _, wc) = a.weights();
    let center = &a.channels[mu.index()].center;
    Ok(2.0 * d.omega_d * wc * (center.down - center.up))
}

/// `(P_-, P_+) = (gminus, gplus) / (gplus + gminus)`.
pub fn two_level_balance(gplus: f64, gminus: f64) -> Result<PopulationVector> {
    if !(gplus >= 0.0 && gminus >= 0.0) {
        return Err(Error::Validation(format!(
            "rates must be non-negative, got ({gplus}, {gminus})"
        )));
    }
    let total = gplus + gminus;
    if total == 0.0 {
        return Err(Error::Reducible {
            blocks: vec![vec![0], vec![1]],
        });
    }
    PopulationVector::new(vec![gminus / total, gplus / total])
}
