//! Steady-state energy currents of periodically driven open quantum systems.
//!
//! Three reduced descriptions are provided: the driven dressed master
//! equation, its traditional (undriven-rate) counterpart and the Floquet
//! master equation. Analytic and brute-force references live in [`oracle`].

pub mod dqme;
pub mod error;
pub mod floquet;
pub mod model;
pub mod operator;
pub mod oracle;
pub mod reservoir;

pub use dqme::{dressed_currents, CurrentReport, Method, PopulationVector, RateTable};
pub use error::{Error, Result};
pub use floquet::{converged_floquet_currents, floquet_currents, FloquetControls};
pub use model::{build_rotated, DriveSpec, ModelSpec, RotatedSystem};
pub use operator::{hermitian_eigendecompose, EigenSystem, Operator};
pub use reservoir::{Reservoir, ReservoirLabel, Reservoirs};
