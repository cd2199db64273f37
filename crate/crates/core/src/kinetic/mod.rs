//! One-dimensional discrete-velocity kinetic model: gas constants, grids,
//! distribution and macroscopic fields, the discrete Maxwell-Boltzmann
//! equilibrium and the moment restriction.

mod equilibrium;
mod field;
mod gas;
mod grid;
mod moments;

pub use equilibrium::{
    discrete_equilibrium, fill_equilibrium, maxwellian, truncated_mass_fraction, EquilibriumCoeffs,
    EquilibriumSolver,
};
pub use field::{DistributionField, MacroFields, MacroState};
pub use gas::{GasParams, BOLTZMANN};
pub use grid::{SpatialGrid, VelocityGrid};
pub use moments::{
    mean_free_path, relaxation_frequency, relaxation_frequency_cell, restrict, restrict_cell,
};
