//! Built-in driven models.
//!
//! Each model supplies a bare Hamiltonian `H_S`, an excitation-number
//! operator `N_A` with `[N_A, H_S] = 0`, and per-reservoir coupling operators
//! `A_l`, `A_r`. The drive `-(eta/2)(e^{-i w_d t} A_l^dag + h.c.)` always acts
//! through `A_l`. In the frame rotating with `R(t) = exp(-i w_d t N_A)` the
//! system Hamiltonian becomes static:
//!
//! ```text
//! H = H_S - w_d N_A - (eta/2)(A_l^dag + A_l)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{boson_annihilation, pauli_lowering, tensor_product, Operator};
use crate::reservoir::ReservoirLabel;

/// Coherent drive: amplitude `eta` and frequency `omega_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSpec {
    pub eta: f64,
    pub omega_d: f64,
}

impl DriveSpec {
    pub fn new(eta: f64, omega_d: f64) -> Result<Self> {
        let d = Self { eta, omega_d };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::Validation(format!("eta must be >= 0, got {}", self.eta)));
        }
        if !(self.omega_d.is_finite() && self.omega_d >= 0.0) {
            return Err(Error::Validation(format!(
                "omega_d must be >= 0, got {}",
                self.omega_d
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    /// Single qubit coupled to both reservoirs through `sigma_-`.
    Nesb { epsilon: f64 },
    /// Two qubits with XY hopping; left qubit driven, each qubit on its own reservoir.
    CoupledSpins {
        epsilon_l: f64,
        epsilon_r: f64,
        hopping: f64,
    },
    /// Kerr oscillator truncated to `n_max` Fock states.
    Kerr { epsilon: f64, chi: f64, n_max: usize },
}

pub const DEFAULT_KERR_N_MAX: usize = 20;

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            ModelSpec::Nesb { epsilon } => positive("epsilon", epsilon),
            ModelSpec::CoupledSpins {
                epsilon_l,
                epsilon_r,
                hopping,
            } => {
                positive("epsilon_l", epsilon_l)?;
                positive("epsilon_r", epsilon_r)?;
                if !hopping.is_finite() {
                    return Err(Error::Validation(format!("hopping must be finite, got {hopping}")));
                }
                Ok(())
            }
            ModelSpec::Kerr { epsilon, chi, n_max } => {
                positive("epsilon", epsilon)?;
                if !(chi.is_finite() && chi >= 0.0) {
                    return Err(Error::Validation(format!("chi must be >= 0, got {chi}")));
                }
                if n_max < 2 {
                    return Err(Error::Validation(format!("n_max must be >= 2, got {n_max}")));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModelSpec::Nesb { .. } => 2,
            ModelSpec::CoupledSpins { .. } => 4,
            ModelSpec::Kerr { n_max, .. } => n_max,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Nesb { .. } => "nesb",
            ModelSpec::CoupledSpins { .. } => "coupled_spins",
            ModelSpec::Kerr { .. } => "kerr",
        }
    }

    /// `(A_l, A_r)`.
    pub fn couplings(&self) -> Result<(Operator, Operator)> {
        self.validate()?;
        Ok(match *self {
            ModelSpec::Nesb { .. } => (pauli_lowering(), pauli_lowering()),
            ModelSpec::CoupledSpins { .. } => {
                let i2 = Operator::identity(2);
                (
                    tensor_product(&pauli_lowering(), &i2),
                    tensor_product(&i2, &pauli_lowering()),
                )
            }
            ModelSpec::Kerr { n_max, .. } => {
                let a = boson_annihilation(n_max)?;
                (a.clone(), a)
            }
        })
    }

    /// `N_A = sum over distinct modes of A^dag A`.
    pub fn number_operator(&self) -> Result<Operator> {
        let (al, ar) = self.couplings()?;
        Ok(match self {
            ModelSpec::CoupledSpins { .. } => &(&al.adjoint() * &al) + &(&ar.adjoint() * &ar),
            _ => &al.adjoint() * &al,
        })
    }

    /// Undriven Hamiltonian `H_S` in the lab frame.
    pub fn bare_hamiltonian(&self) -> Result<Operator> {
        let (al, ar) = self.couplings()?;
        Ok(match *self {
            ModelSpec::Nesb { epsilon } => &(&al.adjoint() * &al) * epsilon,
            ModelSpec::CoupledSpins {
                epsilon_l,
                epsilon_r,
                hopping,
            } => {
                let nl = &al.adjoint() * &al;
                let nr = &ar.adjoint() * &ar;
                let hop = &(&al.adjoint() * &ar) + &(&ar.adjoint() * &al);
                &(&(&nl * epsilon_l) + &(&nr * epsilon_r)) + &(&hop * hopping)
            }
            ModelSpec::Kerr { epsilon, chi, .. } => {
                let ad = al.adjoint();
                let n = &ad * &al;
                let pair = &(&(&ad * &ad) * &al) * &al;
                &(&n * epsilon) + &(&pair * chi)
            }
        })
    }

    /// Same model with a different Fock cutoff; identity for spin models.
    pub fn with_n_max(&self, n_max: usize) -> ModelSpec {
        match *self {
            ModelSpec::Kerr { epsilon, chi, .. } => ModelSpec::Kerr { epsilon, chi, n_max },
            other => other,
        }
    }
}

/// Static rotating-frame Hamiltonian plus the reservoir coupling operators.
#[derive(Clone, Debug, PartialEq)]
pub struct RotatedSystem {
    pub hamiltonian: Operator,
    pub coupling_left: Operator,
    pub coupling_right: Operator,
}

impl RotatedSystem {
    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn coupling(&self, label: ReservoirLabel) -> &Operator {
        match label {
            ReservoirLabel::Left => &self.coupling_left,
            ReservoirLabel::Right => &self.coupling_right,
        }
    }
}

fn rotate(m: &ModelSpec, d: &DriveSpec) -> Result<RotatedSystem> {
    m.validate()?;
    d.validate()?;
    let (al, ar) = m.couplings()?;
    let drive = &(&al + &al.adjoint()) * (-0.5 * d.eta);
    let detuned = &m.bare_hamiltonian()? - &(&m.number_operator()? * d.omega_d);
    Ok(RotatedSystem {
        hamiltonian: &detuned + &drive,
        coupling_left: al,
        coupling_right: ar,
    })
}

fn wrong_variant(expected: &str, m: &ModelSpec) -> Error {
    Error::Validation(format!("expected a {expected} model, got {}", m.name()))
}

/// `H = Delta sigma_+ sigma_- - (eta/2)(sigma_+ + sigma_-)`, `Delta = epsilon - omega_d`.
pub fn build_nesb(m: &ModelSpec, d: &DriveSpec) -> Result<RotatedSystem> {
    match m {
        ModelSpec::Nesb { .. } => rotate(m, d),
        _ => Err(wrong_variant("nesb", m)),
    }
}

/// Per-site detuning `Delta_mu = epsilon_mu - omega_d`; drive on the left qubit only.
pub fn build_coupled_spins(m: &ModelSpec, d: &DriveSpec) -> Result<RotatedSystem> {
    match m {
        ModelSpec::CoupledSpins { .. } => rotate(m, d),
        _ => Err(wrong_variant("coupled_spins", m)),
    }
}

/// `H = Delta a^dag a + chi (a^dag)^2 a^2 - (eta/2)(a^dag + a)` on `n_max` Fock states.
pub fn build_kerr(m: &ModelSpec, d: &DriveSpec) -> Result<RotatedSystem> {
    match m {
        ModelSpec::Kerr { .. } => rotate(m, d),
        _ => Err(wrong_variant("kerr", m)),
    }
}

pub fn build_rotated(m: &ModelSpec, d: &DriveSpec) -> Result<RotatedSystem> {
    rotate(m, d)
}

/// Lab-frame driven Hamiltonian `H_DS(t) = H_S - (eta/2)(e^{-i w_d t} A_l^dag + e^{i w_d t} A_l)`.
#[derive(Clone, Debug)]
pub struct LabFrame {
    bare: Operator,
    raise: Operator,
    lower: Operator,
    eta: f64,
    omega_d: f64,
}

impl LabFrame {
    pub fn new(m: &ModelSpec, d: &DriveSpec) -> Result<Self> {
        m.validate()?;
        d.validate()?;
        let (al, _) = m.couplings()?;
        Ok(Self {
            bare: m.bare_hamiltonian()?,
            raise: al.adjoint(),
            lower: al,
            eta: d.eta,
            omega_d: d.omega_d,
        })
    }

    pub fn dim(&self) -> usize {
        self.bare.dim()
    }

    pub fn at(&self, t: f64) -> Operator {
        let phase = Complex64::from_polar(1.0, -self.omega_d * t);
        let h = -0.5 * self.eta;
        let drive = &self.raise.scale(phase * h) + &self.lower.scale(phase.conj() * h);
        &self.bare + &drive
    }

    /// Drive period `2 pi / omega_d`; a static drive has none.
    pub fn period(&self) -> Result<f64> {
        if self.omega_d > 0.0 {
            Ok(std::f64::consts::TAU / self.omega_d)
        } else {
            Err(Error::NoPeriod {
                omega_d: self.omega_d,
            })
        }
    }

    pub fn omega_d(&self) -> f64 {
        self.omega_d
    }
}

pub fn lab_frame_hamiltonian(m: &ModelSpec, d: &DriveSpec, t: f64) -> Result<Operator> {
    Ok(LabFrame::new(m, d)?.at(t))
}
