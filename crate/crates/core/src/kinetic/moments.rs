use super::field::{DistributionField, MacroFields, MacroState};
use super::gas::GasParams;
use super::grid::VelocityGrid;
use crate::error::{Error, Result};

/// `(n, u, T)` of one cell. `f` is in stored units and divided by `scale`.
pub fn restrict_cell(
    f: &[f64],
    vgrid: &VelocityGrid,
    gas: &GasParams,
    scale: f64,
    cell: usize,
) -> Result<MacroState> {
    let dv = vgrid.dv() / scale;
    let v = vgrid.velocities();
    let n = f.iter().sum::<f64>() * dv;
    if !(n > 0.0) {
        return Err(Error::ZeroDensity { cell, density: n });
    }
    let u = f.iter().zip(v).map(|(fi, vi)| fi * vi).sum::<f64>() * dv / n;
    let e = f
        .iter()
        .zip(v)
        .map(|(fi, vi)| fi * (vi - u) * (vi - u))
        .sum::<f64>()
        * dv;
    let t = gas.molecular_mass / (gas.boltzmann * n) * e;
    Ok(MacroState::new(n, u, t))
}

pub fn restrict(f: &DistributionField, gas: &GasParams) -> Result<MacroFields> {
    (0..f.n_cells())
        .map(|j| restrict_cell(f.cell(j), &f.vgrid, gas, f.mass_scale, j))
        .collect::<Result<Vec<_>>>()
        .map(MacroFields::from_states)
}

/// BGK collision frequency `n k_B T / mu(T)` in 1/s.
#[inline]
pub fn relaxation_frequency_cell(state: MacroState, gas: &GasParams) -> f64 {
    state.n * gas.boltzmann * state.t / gas.viscosity(state.t)
}

pub fn relaxation_frequency(macro_fields: &MacroFields, gas: &GasParams) -> Vec<f64> {
    macro_fields
        .states()
        .map(|s| relaxation_frequency_cell(s, gas))
        .collect()
}

/// Hard-sphere mean free path `1 / (sqrt(2) pi d^2 n)`.
pub fn mean_free_path(gas: &GasParams, n: f64) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI * gas.molecular_diameter.powi(2) * n)
}
