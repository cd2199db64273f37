use super::grid::{SpatialGrid, VelocityGrid};
use crate::error::{Error, Result};

/// Macroscopic state of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    /// number density, 1/m^3
    pub n: f64,
    /// mean flow velocity, m/s
    pub u: f64,
    /// temperature, K
    pub t: f64,
}

impl MacroState {
    pub fn new(n: f64, u: f64, t: f64) -> Self {
        MacroState { n, u, t }
    }
}

/// Per-cell `(n, u, T)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MacroFields {
    pub number_density: Vec<f64>,
    pub velocity: Vec<f64>,
    pub temperature: Vec<f64>,
}

impl MacroFields {
    pub fn uniform(n_cells: usize, state: MacroState) -> Self {
        MacroFields {
            number_density: vec![state.n; n_cells],
            velocity: vec![state.u; n_cells],
            temperature: vec![state.t; n_cells],
        }
    }

    pub fn from_states(states: impl IntoIterator<Item = MacroState>) -> Self {
        let mut out = MacroFields::default();
        for s in states {
            out.push(s);
        }
        out
    }

    pub fn push(&mut self, s: MacroState) {
        self.number_density.push(s.n);
        self.velocity.push(s.u);
        self.temperature.push(s.t);
    }

    pub fn len(&self) -> usize {
        self.number_density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.number_density.is_empty()
    }

    pub fn cell(&self, j: usize) -> MacroState {
        MacroState::new(
            self.number_density[j],
            self.velocity[j],
            self.temperature[j],
        )
    }

    pub fn states(&self) -> impl Iterator<Item = MacroState> + '_ {
        (0..self.len()).map(|j| self.cell(j))
    }
}

/// `f(x_j, v_i)` stored cell-major: `values[j * n_velocities + i]`.
///
/// Values may be stored multiplied by `mass_scale` (the molecular mass when
/// the field holds mass density per unit velocity); physical number density
/// per unit velocity is `values / mass_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    pub grid: SpatialGrid,
    pub vgrid: VelocityGrid,
    pub values: Vec<f64>,
    pub time: f64,
    pub mass_scale: f64,
}

impl DistributionField {
    pub fn new(
        grid: SpatialGrid,
        vgrid: VelocityGrid,
        values: Vec<f64>,
        time: f64,
        mass_scale: f64,
    ) -> Result<Self> {
        let expected = grid.n_cells() * vgrid.len();
        if values.len() != expected {
            return Err(Error::argument(format!(
                "field payload has {} values, grids need {expected}",
                values.len()
            )));
        }
        if !(mass_scale > 0.0 && mass_scale.is_finite()) {
            return Err(Error::argument(format!(
                "mass scale must be positive, got {mass_scale}"
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite value in distribution field at cell {}, velocity {}",
                pos / vgrid.len(),
                pos % vgrid.len()
            )));
        }
        Ok(DistributionField {
            grid,
            vgrid,
            values,
            time,
            mass_scale,
        })
    }

    pub fn zeros(grid: SpatialGrid, vgrid: VelocityGrid, mass_scale: f64) -> Self {
        let len = grid.n_cells() * vgrid.len();
        DistributionField {
            grid,
            vgrid,
            values: vec![0.0; len],
            time: 0.0,
            mass_scale,
        }
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    #[inline]
    pub fn n_velocities(&self) -> usize {
        self.vgrid.len()
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        let q = self.n_velocities();
        &self.values[j * q..(j + 1) * q]
    }

    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        let q = self.n_velocities();
        &mut self.values[j * q..(j + 1) * q]
    }

    pub fn same_grids(&self, other: &DistributionField) -> bool {
        self.grid == other.grid && self.vgrid == other.vgrid
    }

    /// Total `dx dv`-weighted mass in stored units.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.vgrid.dv()
    }

    /// Domain totals of `f`, `v f` and `v^2 f / 2`, in stored units.
    pub fn moment_totals(&self) -> [f64; 3] {
        let v = self.vgrid.velocities();
        let mut t = [0.0; 3];
        for cell in self.values.chunks(v.len()) {
            for (&fi, &vi) in cell.iter().zip(v) {
                t[0] += fi;
                t[1] += vi * fi;
                t[2] += 0.5 * vi * vi * fi;
            }
        }
        let w = self.grid.dx() * self.vgrid.dv();
        t.map(|x| x * w)
    }
}
