use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, Schur};

use super::propagator::PeriodPropagator;
use crate::error::{Error, Result};
use crate::operator::C64;

/// Floquet modes sampled over one period together with their quasienergies.
#[derive(Clone, Debug)]
pub struct FloquetSystem {
    quasienergies: Vec<f64>,
    /// `modes[k]` holds `|psi_alpha(t_k)>` as column `alpha`, `k = 0..=n_t`.
    modes: Vec<DMatrix<C64>>,
    period: f64,
}

/// Folds `e` into the zone `(-omega/2, omega/2]`.
pub fn fold_quasienergy(e: f64, omega: f64) -> f64 {
    let mut f = e - omega * (e / omega).round();
    if f <= -0.5 * omega {
        f += omega;
    } else if f > 0.5 * omega {
        f -= omega;
    }
    f
}

/// Eigenpairs of a unitary matrix. The Schur form of a normal matrix is
/// diagonal, so the Schur vectors are already an orthonormal eigenbasis.
fn unitary_eigen(u: &DMatrix<C64>) -> Result<(Vec<C64>, DMatrix<C64>)> {
    let schur = Schur::try_new(u.clone(), 1e-15, 100_000).ok_or(Error::Decomposition(
        "Schur iteration on the one-period propagator did not converge",
    ))?;
    let (q, t) = schur.unpack();
    Ok(((0..t.nrows()).map(|i| t[(i, i)]).collect(), q))
}

impl FloquetSystem {
    pub fn from_propagator(p: &PeriodPropagator) -> Result<Self> {
        let omega = p.omega();
        let period = p.period();
        let (eigenvalues, q) = unitary_eigen(p.monodromy())?;
        let n = eigenvalues.len();
        for lambda in &eigenvalues {
            if (lambda.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::Validation(format!(
                    "propagator eigenvalue {lambda} is off the unit circle"
                )));
            }
        }
        let raw: Vec<f64> = eigenvalues
            .iter()
            .map(|l| fold_quasienergy(-l.arg() / period, omega))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        let quasienergies: Vec<f64> = order.iter().map(|&a| raw[a]).collect();

        let mut initial = DMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
        for mut col in initial.column_iter_mut() {
            let cutoff = col.camax() * (1.0 - 1e-10);
            let pivot = col.iter().copied().find(|z| z.norm() >= cutoff).unwrap_or(C64::new(1.0, 0.0));
            let phase = pivot.conj() / pivot.norm();
            col *= phase;
        }

        let modes = (0..=p.n_t())
            .map(|k| {
                let t = p.time(k);
                let mut m = p.sample(k) * &initial;
                for (a, mut col) in m.column_iter_mut().enumerate() {
                    col *= Complex::from_polar(1.0, quasienergies[a] * t);
                }
                m
            })
            .collect();
        Ok(Self {
            quasienergies,
            modes,
            period,
        })
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn quasienergies(&self) -> &[f64] {
        &self.quasienergies
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn n_t(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.period * k as f64 / self.n_t() as f64
    }

    /// Modes at sample `k` as columns.
    pub fn modes_at(&self, k: usize) -> &DMatrix<C64> {
        &self.modes[k]
    }

    /// `max |psi_alpha(T) - psi_alpha(0)|`.
    pub fn periodicity_error(&self) -> f64 {
        (&self.modes[self.n_t()] - &self.modes[0]).camax()
    }

    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        self.modes
            .iter()
            .map(|m| (m.adjoint() * m - DMatrix::<C64>::identity(n, n)).camax())
            .fold(0.0, f64::max)
    }

    /// Relabels mode `alpha` by `shift` Brillouin zones: `eps -> eps + shift
    /// Omega`, `psi(t) -> psi(t) e^{i shift Omega t}`. The physics is unchanged.
    pub fn shift_gauge(&mut self, alpha: usize, shift: i64) {
        let omega = self.omega();
        self.quasienergies[alpha] += shift as f64 * omega;
        for k in 0..self.modes.len() {
            let t = self.time(k);
            let mut col = self.modes[k].column_mut(alpha);
            col *= Complex::from_polar(1.0, shift as f64 * omega * t);
        }
    }
}

pub fn floquet_decompose(p: &PeriodPropagator) -> Result<FloquetSystem> {
    FloquetSystem::from_propagator(p)
}
