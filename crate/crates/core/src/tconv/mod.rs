//! Twisted convolution of measures: phase chains, direct quadrature, densities.

mod critical;
mod density;
mod direct;
mod phase;

pub use critical::{critical_set_area, CriticalArea};
pub use density::{
    cell_centers, grid_pairing, pairing_oracle, sample_cell, CellSample, tconv_density, DensityConfig, DensityEvaluator, DensitySample, GridPairing,
};
pub use direct::tconv_weyl_direct;
pub use phase::{phase_phi_2, phase_phi_k, PhaseChain};
