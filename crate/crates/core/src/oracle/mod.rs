//! Independent references for the reduced pipelines: closed forms for the
//! driven two-level system and a brute-force Lindblad integrator.

mod evolve;
mod nesb;

pub use evolve::{basis_projector, evolve_full_master_equation, FullMasterEquation};
pub use nesb::{
    mixing_angle, near_resonance_current, nesb_analytic_currents, two_level_balance, ChannelRates,
    NesbAnalytic, NesbChannels,
};
