use nalgebra::{DMatrix, DVector};

use crate::dqme::{build_population_generator, RateTable};
use crate::error::{Error, Result};
use crate::model::RotatedSystem;
use crate::operator::{c, hermitian_eigendecompose, EigenSystem, Operator, C64};

/// Largest `dt * spectral radius` accepted by the fixed-step RK4 scheme.
const RK4_STABILITY_LIMIT: f64 = 2.5;
const TRACE_TOLERANCE: f64 = 1e-10;
const STATE_TOLERANCE: f64 = 1e-12;

/// Full Lindblad generator in the bare basis:
///
/// `d rho/dt = -i[H, rho] + sum_{m,m'} G_{m<-m'} D[|m><m'|] rho`
///
/// with every ordered eigenstate pair (diagonal ones included) as a jump.
/// Coherences are carried explicitly, so this integrator checks the
/// population-only reduction rather than assuming it.
#[derive(Clone, Debug)]
pub struct FullMasterEquation {
    eigen: EigenSystem,
    h_eff: DMatrix<C64>,
    /// `transfer[(m, m')] = G_{m<-m'}`.
    transfer: DMatrix<f64>,
    generator: DMatrix<f64>,
}

impl FullMasterEquation {
    pub fn new(sys: &RotatedSystem, rt: &RateTable) -> Result<Self> {
        let eigen = hermitian_eigendecompose(&sys.hamiltonian)?;
        let n = eigen.dim();
        if rt.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rt.dim(),
            });
        }
        let mut transfer = DMatrix::zeros(n, n);
        for ch in rt.channels() {
            transfer[(ch.target, ch.source)] += ch.down;
            transfer[(ch.source, ch.target)] += ch.up;
        }
        let outflow: Vec<f64> = (0..n).map(|j| transfer.column(j).sum()).collect();
        let v = eigen.vectors();
        let k = v * DMatrix::from_diagonal(&DVector::from_iterator(n, outflow.iter().map(|&x| c(x)))) * v.adjoint();
        let h_eff = sys.hamiltonian.matrix() - k * C64::new(0.0, 0.5);
        Ok(Self {
            eigen,
            h_eff,
            transfer,
            generator: build_population_generator(rt),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    /// `L[rho]` in the bare basis.
    pub fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = self.eigen.vectors();
        let n = self.dim();
        let pops = DVector::from_iterator(n, (0..n).map(|m| v.column(m).dotc(&(rho * v.column(m))).re));
        let gain = &self.transfer * pops;
        let jumps = v * DMatrix::from_diagonal(&gain.map(c)) * v.adjoint();
        let i = C64::new(0.0, 1.0);
        (&self.h_eff * rho - rho * self.h_eff.adjoint()) * (-i) + jumps
    }

    /// Upper bound on the generator's spectral radius.
    pub fn spectral_radius_bound(&self) -> f64 {
        let e = self.eigen.energies();
        let spread = e[e.len() - 1] - e[0];
        let decay = self.transfer.column_iter().map(|col| col.sum()).fold(0.0, f64::max);
        spread + 2.0 * decay
    }

    /// Slowest nonzero relaxation rate among populations and coherences.
    pub fn slowest_rate(&self) -> f64 {
        let n = self.dim();
        let scale = self.generator.amax().max(f64::MIN_POSITIVE);
        let mut slowest = self
            .generator
            .complex_eigenvalues()
            .iter()
            .map(|l| -l.re)
            .filter(|&r| r > 1e-10 * scale)
            .fold(f64::INFINITY, f64::min);
        let out: Vec<f64> = (0..n).map(|j| self.transfer.column(j).sum()).collect();
        for a in 0..n {
            for b in 0..a {
                let r = 0.5 * (out[a] + out[b]);
                if r > 0.0 {
                    slowest = slowest.min(r);
                }
            }
        }
        slowest
    }

    /// Populations of `rho` in the eigenbasis of the rotated Hamiltonian.
    pub fn populations(&self, rho: &Operator) -> Vec<f64> {
        let d = self.eigen.to_eigenbasis(rho);
        (0..self.dim()).map(|m| d[(m, m)].re).collect()
    }

    /// Largest off-diagonal magnitude of `rho` in the eigenbasis.
    pub fn max_coherence(&self, rho: &Operator) -> f64 {
        let d = self.eigen.to_eigenbasis(rho);
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(d[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Fixed-step RK4 from `rho0` to `t_final`; `observe` sees every step.
    pub fn evolve_observed(
        &self,
        rho0: &Operator,
        t_final: f64,
        dt: f64,
        mut observe: impl FnMut(f64, &DMatrix<C64>),
    ) -> Result<Operator> {
        validate_density_matrix(rho0, self.dim())?;
        if !(t_final >= 0.0 && dt > 0.0) {
            return Err(Error::Validation(format!(
                "need t_final >= 0 and dt > 0, got {t_final} and {dt}"
            )));
        }
        let radius = dt * self.spectral_radius_bound();
        if radius > RK4_STABILITY_LIMIT {
            return Err(Error::StepTooLarge {
                measure: "dt times spectral radius",
                value: radius,
                limit: RK4_STABILITY_LIMIT,
            });
        }
        let steps = (t_final / dt).ceil() as usize;
        let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
        let mut rho = rho0.matrix().clone();
        for step in 1..=steps {
            let k1 = self.rhs(&rho);
            let k2 = self.rhs(&(&rho + &k1 * c(h / 2.0)));
            let k3 = self.rhs(&(&rho + &k2 * c(h / 2.0)));
            let k4 = self.rhs(&(&rho + &k3 * c(h)));
            rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
            rho = (&rho + rho.adjoint()) * c(0.5);
            let drift = (rho.trace() - c(1.0)).norm();
            if !(drift <= TRACE_TOLERANCE) {
                return Err(Error::StepTooLarge {
                    measure: "trace drift",
                    value: drift,
                    limit: TRACE_TOLERANCE,
                });
            }
            observe(step as f64 * h, &rho);
        }
        Operator::from_matrix(rho)
    }
}

fn validate_density_matrix(rho: &Operator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    let trace = rho.trace();
    if (trace - c(1.0)).norm() > STATE_TOLERANCE {
        return Err(Error::Validation(format!("initial state has trace {trace}")));
    }
    let lowest = hermitian_eigendecompose(rho)?.energy(0);
    if lowest < -STATE_TOLERANCE {
        return Err(Error::Validation(format!(
            "initial state is not positive semidefinite (eigenvalue {lowest:e})"
        )));
    }
    Ok(())
}

/// Integrates the full master equation and returns `rho(t_final)` in the bare basis.
pub fn evolve_full_master_equation(
    sys: &RotatedSystem,
    rt: &RateTable,
    rho0: &Operator,
    t_final: f64,
    dt: f64,
) -> Result<Operator> {
    FullMasterEquation::new(sys, rt)?.evolve_observed(rho0, t_final, dt, |_, _| {})
}

/// Pure state `|n><n|` of the bare basis.
pub fn basis_projector(dim: usize, n: usize) -> Operator {
    let mut diag = vec![0.0; dim];
    diag[n] = 1.0;
    Operator::diagonal(&diag)
}
