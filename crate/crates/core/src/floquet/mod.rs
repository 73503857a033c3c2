//! Floquet master equation computed directly from the lab-frame Hamiltonian.
//!
//! The one-period propagator is built by time-ordered short-step
//! exponentials, its eigenphases give the quasienergies, and the Floquet
//! modes are sampled on a uniform grid so that every coupling matrix element
//! can be split into sidebands by FFT. No rotating-frame eigenvectors are
//! reused, which keeps the comparison with the dressed pipeline independent.

mod modes;
mod propagator;
mod sidebands;

pub use modes::{floquet_decompose, fold_quasienergy, FloquetSystem};
pub use propagator::{
    propagate_one_period, unitarity_error, FloquetControls, Integrator, PeriodPropagator, MIN_STEPS,
    UNITARITY_TOLERANCE,
};
pub use sidebands::{
    fourier_components, SidebandCoefficients, SidebandSpectrum, SidebandTable, PARSEVAL_TOLERANCE,
};

use crate::dqme::{build_population_generator, solve_steady_state, CurrentReport, Method, PopulationVector, RateTable};
use crate::error::{Error, Result};
use crate::model::{DriveSpec, LabFrame, ModelSpec};
use crate::reservoir::Reservoirs;

/// Relative current change accepted between two rungs of the control ladder.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;
/// The ladder stops once `n_steps` would exceed this.
pub const MAX_STEPS: usize = 1 << 17;

#[derive(Clone, Debug)]
pub struct FloquetSolution {
    pub system: FloquetSystem,
    pub sidebands: SidebandTable,
    pub table: RateTable,
    pub populations: PopulationVector,
    pub report: CurrentReport,
    /// Controls actually used, after any sideband widening.
    pub controls: FloquetControls,
    pub unitarity_error: f64,
}

/// Steady-state Floquet currents for a finished sideband table.
pub fn fme_rates_and_currents(st: &SidebandTable, reservoirs: &Reservoirs) -> Result<CurrentReport> {
    Ok(solve_sidebands(st, reservoirs)?.2)
}

fn solve_sidebands(
    st: &SidebandTable,
    reservoirs: &Reservoirs,
) -> Result<(RateTable, PopulationVector, CurrentReport)> {
    let table = st.rate_table(reservoirs)?;
    let populations = solve_steady_state(&build_population_generator(&table))?;
    let report = CurrentReport::from_table(Method::Floquet, &table, &populations);
    Ok((table, populations, report))
}

/// Sideband table for a decomposed system; fails if `m_max` leaves a Parseval tail.
pub fn sideband_table(fs: &FloquetSystem, m: &ModelSpec, m_max: usize) -> Result<SidebandTable> {
    let (al, ar) = m.couplings()?;
    SidebandTable::new(fs, fourier_components(fs, &al, m_max)?, fourier_components(fs, &ar, m_max)?)
}

/// One Floquet evaluation at fixed time resolution. The sideband cutoff is
/// widened (and the sampling refined if needed) until the Parseval check holds.
pub fn floquet_solve(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    controls: &FloquetControls,
) -> Result<FloquetSolution> {
    controls.validate()?;
    let lab = LabFrame::new(m, d)?;
    let (al, ar) = m.couplings()?;
    let mut controls = *controls;
    loop {
        let p = PeriodPropagator::new(&lab, controls.n_steps, controls.n_t, controls.integrator)?;
        let system = floquet_decompose(&p)?;
        let left = SidebandSpectrum::new(&system, &al)?;
        let right = SidebandSpectrum::new(&system, &ar)?;
        let need = left.minimal_m_max().max(right.minimal_m_max());
        if 4 * need > controls.n_t {
            if controls.n_steps >= MAX_STEPS {
                return Err(Error::InsufficientSidebands {
                    m_max: controls.m_max,
                    tail: left.tail(controls.m_max).max(right.tail(controls.m_max)),
                    tolerance: PARSEVAL_TOLERANCE,
                });
            }
            controls = controls.with_sidebands(need.max(2 * controls.m_max));
            continue;
        }
        controls.m_max = controls.m_max.max(need);
        let sidebands = SidebandTable::new(&system, left.truncate(controls.m_max)?, right.truncate(controls.m_max)?)?;
        let (table, populations, report) = solve_sidebands(&sidebands, reservoirs)?;
        return Ok(FloquetSolution {
            unitarity_error: p.unitarity_error(),
            system,
            sidebands,
            table,
            populations,
            report,
            controls,
        });
    }
}

/// Floquet currents at a single resolution.
pub fn floquet_currents(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    controls: &FloquetControls,
) -> Result<CurrentReport> {
    Ok(floquet_solve(m, d, reservoirs, controls)?.report)
}

/// Result of climbing the control ladder.
#[derive(Clone, Debug)]
pub struct ConvergedFloquet {
    pub report: CurrentReport,
    pub controls: FloquetControls,
    /// Relative change against the previous rung.
    pub change: f64,
}

/// Refines `(n_steps, n_t, m_max) -> (2 n_steps, 2 n_t, m_max + 2)` until the
/// currents move by less than [`CONVERGENCE_TOLERANCE`].
pub fn converged_floquet_currents(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    controls: &FloquetControls,
) -> Result<ConvergedFloquet> {
    let mut coarse = floquet_solve(m, d, reservoirs, controls)?;
    loop {
        let next = coarse.controls.refined();
        let fine = floquet_solve(m, d, reservoirs, &next)?;
        let change = fine.report.relative_distance(&coarse.report);
        if change < CONVERGENCE_TOLERANCE {
            return Ok(ConvergedFloquet {
                report: fine.report,
                controls: fine.controls,
                change,
            });
        }
        if fine.controls.n_steps >= MAX_STEPS {
            return Err(Error::NotConverged {
                what: "Floquet currents",
                change,
                detail: format!("{:?}", fine.controls),
            });
        }
        coarse = fine;
    }
}
