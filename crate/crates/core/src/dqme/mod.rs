//! Dressed-picture master equations in the rotating frame.
//!
//! Rates live on ordered eigenstate pairs of the rotated Hamiltonian. The
//! driven variant evaluates the reservoir kernels at `omega_d + E_source -
//! E_target`, the traditional variant at `E_source - E_target`. Populations
//! decouple from coherences, so the steady state is the null vector of a
//! classical rate generator.

mod current;
mod rates;
mod steady_state;

pub use current::{energy_current, pump_current, CurrentReport, Method};
pub use rates::{build_rate_table, build_rate_table_traditional, Channel, RateTable};
pub use steady_state::{build_population_generator, solve_steady_state, PopulationVector};

use crate::error::{Error, Result};
use crate::model::{build_rotated, DriveSpec, ModelSpec, RotatedSystem};
use crate::operator::{hermitian_eigendecompose, EigenSystem};
use crate::reservoir::Reservoirs;

/// Everything produced by one dressed-picture evaluation.
#[derive(Clone, Debug)]
pub struct DressedSolution {
    pub eigen: EigenSystem,
    pub table: RateTable,
    pub populations: PopulationVector,
    pub report: CurrentReport,
}

/// Build, solve and evaluate currents for an already rotated system.
pub fn solve_dressed(
    sys: &RotatedSystem,
    reservoirs: &Reservoirs,
    d: &DriveSpec,
    method: Method,
) -> Result<DressedSolution> {
    let eigen = hermitian_eigendecompose(&sys.hamiltonian)?;
    let table = match method {
        Method::Driven => build_rate_table(sys, &eigen, reservoirs, d)?,
        Method::Traditional => build_rate_table_traditional(sys, &eigen, reservoirs)?,
        Method::Floquet => {
            return Err(Error::Validation(
                "the Floquet method is not a dressed-picture scheme".into(),
            ))
        }
    };
    let populations = solve_steady_state(&build_population_generator(&table))?;
    let report = CurrentReport::from_table(method, &table, &populations);
    Ok(DressedSolution {
        eigen,
        table,
        populations,
        report,
    })
}

pub fn dressed_currents(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    method: Method,
) -> Result<CurrentReport> {
    let sys = build_rotated(m, d)?;
    Ok(solve_dressed(&sys, reservoirs, d, method)?.report)
}

/// Relative current change accepted between successive Fock truncations.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;
/// Fock levels added per escalation step.
pub const TRUNCATION_STEP: usize = 8;
/// Largest Fock dimension tried before giving up.
pub const MAX_TRUNCATION: usize = 160;

/// Evaluates `eval` on `m` and, for the Kerr model, on ever larger Fock
/// spaces until the currents stop moving. Returns the report at the largest
/// truncation together with the model it was computed for.
pub fn escalate_truncation(
    m: &ModelSpec,
    mut eval: impl FnMut(&ModelSpec) -> Result<CurrentReport>,
) -> Result<(CurrentReport, ModelSpec)> {
    let ModelSpec::Kerr { n_max, .. } = *m else {
        return Ok((eval(m)?, *m));
    };
    let mut report = eval(m)?;
    let mut n = n_max;
    loop {
        n += TRUNCATION_STEP;
        let next = m.with_n_max(n);
        let refined = eval(&next)?;
        let change = refined.relative_distance(&report);
        if change < TRUNCATION_TOLERANCE {
            return Ok((refined, next));
        }
        if n >= MAX_TRUNCATION {
            return Err(Error::NotConverged {
                what: "Fock truncation",
                change,
                detail: format!("n_max = {n}"),
            });
        }
        report = refined;
    }
}

/// Dressed currents with automatic Fock-space escalation for the Kerr model.
pub fn converged_dressed_currents(
    m: &ModelSpec,
    d: &DriveSpec,
    reservoirs: &Reservoirs,
    method: Method,
) -> Result<(CurrentReport, ModelSpec)> {
    escalate_truncation(m, |m| dressed_currents(m, d, reservoirs, method))
}
