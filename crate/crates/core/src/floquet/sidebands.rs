use rustfft::FftPlanner;

use super::modes::FloquetSystem;
use crate::dqme::{Channel, RateTable};
use crate::error::{Error, Result};
use crate::operator::{Operator, C64};
use crate::reservoir::{ReservoirLabel, Reservoirs};

/// Parseval tail allowed outside `|m| <= m_max`, relative to the largest pair norm.
pub const PARSEVAL_TOLERANCE: f64 = 1e-8;

/// Full discrete Fourier spectrum of `<psi_a(t)|A|psi_b(t)>` for every mode pair.
#[derive(Clone, Debug)]
pub struct SidebandSpectrum {
    dim: usize,
    n_t: usize,
    /// `power[(a * dim + b) * n_t + bin] = |sigma_{ab,m}|^2`; bin `m mod n_t`.
    power: Vec<f64>,
    /// `(1/N) sum_k |f_ab(t_k)|^2` per pair.
    norms: Vec<f64>,
}

impl SidebandSpectrum {
    pub fn new(fs: &FloquetSystem, coupling: &Operator) -> Result<Self> {
        let dim = fs.dim();
        if coupling.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coupling.dim(),
            });
        }
        let n_t = fs.n_t();
        let mut series = vec![C64::new(0.0, 0.0); dim * dim * n_t];
        for k in 0..n_t {
            let psi = fs.modes_at(k);
            let elements = psi.adjoint() * coupling.matrix() * psi;
            for a in 0..dim {
                for b in 0..dim {
                    series[(a * dim + b) * n_t + k] = elements[(a, b)];
                }
            }
        }
        let norms = series
            .chunks(n_t)
            .map(|f| f.iter().map(|z| z.norm_sqr()).sum::<f64>() / n_t as f64)
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(n_t);
        fft.process(&mut series);
        let scale = 1.0 / (n_t as f64 * n_t as f64);
        let power = series.iter().map(|z| z.norm_sqr() * scale).collect();
        Ok(Self {
            dim,
            n_t,
            power,
            norms,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// `|sigma_{ab,m}|^2`, with `m` taken modulo `n_t`.
    pub fn power(&self, a: usize, b: usize, m: i64) -> f64 {
        let bin = m.rem_euclid(self.n_t as i64) as usize;
        self.power[(a * self.dim + b) * self.n_t + bin]
    }

    /// Largest pair norm; the Parseval tolerance is taken relative to it.
    pub fn reference_norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// Largest Parseval tail `norm - sum_{|m| <= m_max} power` over mode pairs.
    pub fn tail(&self, m_max: usize) -> f64 {
        let m = m_max as i64;
        let mut worst = 0.0f64;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let kept: f64 = (-m..=m).map(|s| self.power(a, b, s)).sum();
                worst = worst.max(self.norms[a * self.dim + b] - kept);
            }
        }
        worst
    }

    /// Smallest cutoff whose tail passes the Parseval check.
    pub fn minimal_m_max(&self) -> usize {
        let tolerance = PARSEVAL_TOLERANCE * self.reference_norm();
        let half = (self.n_t / 2) as i64;
        let mut kept = vec![0.0; self.dim * self.dim];
        for m in 0..=half {
            let mut worst = 0.0f64;
            for (pair, k) in kept.iter_mut().enumerate() {
                let base = pair * self.n_t;
                *k += self.power[base + m as usize];
                if m > 0 && m < self.n_t as i64 - m {
                    *k += self.power[base + (self.n_t as i64 - m) as usize];
                }
                worst = worst.max(self.norms[pair] - *k);
            }
            if worst <= tolerance {
                return m as usize;
            }
        }
        self.n_t / 2
    }

    pub fn truncate(&self, m_max: usize) -> Result<SidebandCoefficients> {
        if 4 * m_max > self.n_t {
            return Err(Error::Validation(format!(
                "n_t = {} cannot resolve m_max = {m_max} (need n_t >= 4 m_max)",
                self.n_t
            )));
        }
        let tail = self.tail(m_max);
        let tolerance = PARSEVAL_TOLERANCE * self.reference_norm();
        if tail > tolerance {
            return Err(Error::InsufficientSidebands {
                m_max,
                tail,
                tolerance,
            });
        }
        let m = m_max as i64;
        let width = 2 * m_max + 1;
        let mut weights = Vec::with_capacity(self.dim * self.dim * width);
        for a in 0..self.dim {
            for b in 0..self.dim {
                weights.extend((-m..=m).map(|s| self.power(a, b, s)));
            }
        }
        Ok(SidebandCoefficients {
            dim: self.dim,
            m_max,
            weights,
            tail,
        })
    }
}

/// `|sigma_{ab,m}|^2` for `|m| <= m_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SidebandCoefficients {
    dim: usize,
    m_max: usize,
    weights: Vec<f64>,
    tail: f64,
}

impl SidebandCoefficients {
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn weight(&self, a: usize, b: usize, m: i64) -> f64 {
        let width = 2 * self.m_max + 1;
        self.weights[(a * self.dim + b) * width + (m + self.m_max as i64) as usize]
    }
}

/// Sideband coefficients of one coupling operator, `|m| <= m_max`.
pub fn fourier_components(
    fs: &FloquetSystem,
    coupling: &Operator,
    m_max: usize,
) -> Result<SidebandCoefficients> {
    SidebandSpectrum::new(fs, coupling)?.truncate(m_max)
}

/// Quasienergies and sideband weights for both reservoirs.
#[derive(Clone, Debug)]
pub struct SidebandTable {
    pub quasienergies: Vec<f64>,
    pub omega: f64,
    pub coefficients: [SidebandCoefficients; 2],
}

impl SidebandTable {
    pub fn new(fs: &FloquetSystem, left: SidebandCoefficients, right: SidebandCoefficients) -> Result<Self> {
        if left.m_max != right.m_max || left.dim != fs.dim() || right.dim != fs.dim() {
            return Err(Error::Validation("sideband tables disagree in shape".into()));
        }
        Ok(Self {
            quasienergies: fs.quasienergies().to_vec(),
            omega: fs.omega(),
            coefficients: [left, right],
        })
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn m_max(&self) -> usize {
        self.coefficients[0].m_max
    }

    /// `eps_b - eps_a - m Omega`: energy released into a bath when `b -> a` via sideband `m`.
    pub fn gap(&self, a: usize, b: usize, m: i64) -> f64 {
        self.quasienergies[b] - self.quasienergies[a] - m as f64 * self.omega
    }

    /// One channel per reservoir, mode pair and sideband with nonzero weight.
    pub fn rate_table(&self, reservoirs: &Reservoirs) -> Result<RateTable> {
        let dim = self.dim();
        let m = self.m_max() as i64;
        let mut channels = Vec::new();
        for label in ReservoirLabel::ALL {
            let coeff = &self.coefficients[label.index()];
            for a in 0..dim {
                for b in 0..dim {
                    for s in -m..=m {
                        let weight = coeff.weight(a, b, s);
                        if weight > 0.0 {
                            channels.push(Channel::new(label, a, b, s, self.gap(a, b, s), weight, reservoirs));
                        }
                    }
                }
            }
        }
        RateTable::new(dim, channels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::modes::floquet_decompose;
    use crate::floquet::propagator::{Integrator, PeriodPropagator};
    use crate::model::{DriveSpec, LabFrame, ModelSpec};
    use proptest::prelude::*;

    fn system(m: &ModelSpec, eta: f64, wd: f64) -> FloquetSystem {
        let lab = LabFrame::new(m, &DriveSpec::new(eta, wd).unwrap()).unwrap();
        floquet_decompose(&PeriodPropagator::new(&lab, 2048, 128, Integrator::default()).unwrap()).unwrap()
    }

    #[test]
    fn undriven_coupling_has_one_sideband() {
        let m = ModelSpec::Nesb { epsilon: 1.0 };
        let fs = system(&m, 0.0, 0.7);
        let (a, _) = m.couplings().unwrap();
        let spec = SidebandSpectrum::new(&fs, &a).unwrap();
        // sigma_- links the bare states through a single sideband
        let total: f64 = (0..128).map(|s| spec.power(0, 1, s) + spec.power(1, 0, s)).sum();
        let peak = (0..128).map(|s| spec.power(0, 1, s).max(spec.power(1, 0, s))).fold(0.0, f64::max);
        assert!((total - 1.0).abs() < 1e-12 && (peak - 1.0).abs() < 1e-12);
        assert!(spec.minimal_m_max() <= 1);
    }

    #[test]
    fn nesb_components_are_low_order() {
        let m = ModelSpec::Nesb { epsilon: 1.0 };
        let fs = system(&m, 0.1, 0.7);
        let (a, _) = m.couplings().unwrap();
        let spec = SidebandSpectrum::new(&fs, &a).unwrap();
        assert!(spec.minimal_m_max() <= 2);
        let coeff = spec.truncate(8).unwrap();
        assert!(coeff.tail() < 1e-8);
    }

    #[test]
    fn truncation_checks_tail_and_resolution() {
        let m = ModelSpec::Kerr { epsilon: 1.0, chi: 0.4, n_max: 8 };
        let fs = system(&m, 0.1, 0.5);
        let (a, _) = m.couplings().unwrap();
        let spec = SidebandSpectrum::new(&fs, &a).unwrap();
        let need = spec.minimal_m_max();
        assert!(need > 1);
        assert!(matches!(spec.truncate(need - 1), Err(Error::InsufficientSidebands { .. })));
        assert!(spec.truncate(need).is_ok());
        assert!(spec.truncate(40).is_err());
    }

    #[test]
    fn one_sideband_per_pair() {
        let m = ModelSpec::CoupledSpins { epsilon_l: 1.0, epsilon_r: 1.0, hopping: 0.2 };
        let fs = system(&m, 0.2, 0.7);
        let (a, _) = m.couplings().unwrap();
        let spec = SidebandSpectrum::new(&fs, &a).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let total: f64 = (-64..64).map(|s| spec.power(x, y, s)).sum();
                let peak = (-64..64).map(|s| spec.power(x, y, s)).fold(0.0, f64::max);
                assert!(total - peak < 1e-12 * total.max(1e-300) + 1e-24);
            }
        }
    }

    proptest! {
        #[test]
        fn parseval_identity(eta in 0.0f64..0.4, wd in 0.2f64..1.2) {
            let m = ModelSpec::Nesb { epsilon: 1.0 };
            let lab = LabFrame::new(&m, &DriveSpec::new(eta, wd).unwrap()).unwrap();
            let fs = floquet_decompose(&PeriodPropagator::new(&lab, 256, 32, Integrator::Midpoint).unwrap()).unwrap();
            let (a, _) = m.couplings().unwrap();
            let spec = SidebandSpectrum::new(&fs, &a).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let total: f64 = (0..32).map(|s| spec.power(a, b, s)).sum();
                    prop_assert!((total - spec.norms[a * 2 + b]).abs() < 1e-14);
                }
            }
        }
    }
}
