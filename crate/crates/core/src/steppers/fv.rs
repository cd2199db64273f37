//! Explicit finite-volume BGK scheme for the discrete-velocity equations
//! `df_i/dt + v_i df_i/dx = omega (f_i^eq - f_i)`.
//!
//! One step is
//! `f_i,j <- f_i,j - dt/dx (phi_i,j+1/2 - phi_i,j-1/2) + dt omega_j (f^eq_i,j - f_i,j)`
//! with every term evaluated at the old time level. In inflow mode one frozen
//! ghost cell per side holds the equilibrium of the boundary state.

use rayon::prelude::*;

use super::MicroStepper;
use crate::error::{Error, Result};
use crate::kinetic::{
    relaxation_frequency_cell, restrict_cell, DistributionField, EquilibriumSolver, GasParams,
    MacroState, SpatialGrid, VelocityGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxScheme {
    #[default]
    Upwind,
    Centered,
}

impl std::str::FromStr for FluxScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upwind" => Ok(FluxScheme::Upwind),
            "centered" | "centred" => Ok(FluxScheme::Centered),
            other => Err(Error::argument(format!("unknown flux scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for FluxScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FluxScheme::Upwind => "upwind",
            FluxScheme::Centered => "centered",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundarySpec {
    /// Left ghost holds the equilibrium of `left`, right ghost that of `right`.
    EquilibriumInflow {
        left: MacroState,
        right: MacroState,
    },
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub scheme: FluxScheme,
    pub boundary: BoundarySpec,
    /// `false` drops the BGK term (free streaming).
    pub collisions: bool,
}

impl StepConfig {
    pub fn new(dt: f64, scheme: FluxScheme, boundary: BoundarySpec) -> Self {
        StepConfig {
            dt,
            scheme,
            boundary,
            collisions: true,
        }
    }
}

/// `0.9 / (max|v| / dx + max omega)`.
pub fn stable_dt(vgrid: &VelocityGrid, dx: f64, omega0: &[f64]) -> f64 {
    let omega_max = omega0.iter().copied().fold(0.0, f64::max);
    0.9 / (vgrid.max_abs() / dx + omega_max)
}

/// Stepper bound to one pair of grids, with the ghost equilibria cached.
#[derive(Debug, Clone)]
pub struct FvStepper {
    grid: SpatialGrid,
    vgrid: VelocityGrid,
    gas: GasParams,
    cfg: StepConfig,
    scale: f64,
    ghosts: Option<(Vec<f64>, Vec<f64>)>,
    solver: EquilibriumSolver,
}

impl FvStepper {
    pub fn new(
        grid: SpatialGrid,
        vgrid: VelocityGrid,
        gas: GasParams,
        cfg: StepConfig,
        scale: f64,
    ) -> Result<Self> {
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(Error::argument(format!(
                "time step must be positive, got {}",
                cfg.dt
            )));
        }
        let solver = EquilibriumSolver::default();
        let ghosts = match cfg.boundary {
            BoundarySpec::Periodic => None,
            BoundarySpec::EquilibriumInflow { left, right } => {
                let mut gl = vec![0.0; vgrid.len()];
                let mut gr = vec![0.0; vgrid.len()];
                solver.fill(left, &vgrid, &gas, scale, &mut gl)?;
                solver.fill(right, &vgrid, &gas, scale, &mut gr)?;
                Some((gl, gr))
            }
        };
        Ok(FvStepper {
            grid,
            vgrid,
            gas,
            cfg,
            scale,
            ghosts,
            solver,
        })
    }

    /// Stepper matching the grids and scale of `f`.
    pub fn for_field(f: &DistributionField, gas: GasParams, cfg: StepConfig) -> Result<Self> {
        Self::new(f.grid.clone(), f.vgrid.clone(), gas, cfg, f.mass_scale)
    }

    pub fn config(&self) -> &StepConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    pub fn gas(&self) -> &GasParams {
        &self.gas
    }

    pub fn mass_scale(&self) -> f64 {
        self.scale
    }

    pub fn step_field(&self, f: &DistributionField) -> Result<DistributionField> {
        self.check_field(f)?;
        let mut out = f.clone();
        self.step(&f.values, &mut out.values)?;
        out.time += self.cfg.dt;
        Ok(out)
    }

    pub fn advance(&self, f: &DistributionField, steps: usize) -> Result<DistributionField> {
        self.check_field(f)?;
        let mut cur = f.clone();
        let mut next = f.values.clone();
        for _ in 0..steps {
            self.step(&cur.values, &mut next)?;
            std::mem::swap(&mut cur.values, &mut next);
            cur.time += self.cfg.dt;
        }
        Ok(cur)
    }

    fn check_field(&self, f: &DistributionField) -> Result<()> {
        if f.grid != self.grid || f.vgrid != self.vgrid || f.mass_scale != self.scale {
            return Err(Error::GridMismatch(
                "field does not match the stepper's grids".into(),
            ));
        }
        Ok(())
    }
}

impl MicroStepper for FvStepper {
    fn block_len(&self) -> usize {
        self.vgrid.len()
    }

    fn state_len(&self) -> usize {
        self.vgrid.len() * self.grid.n_cells()
    }

    fn step(&self, f: &[f64], out: &mut [f64]) -> Result<()> {
        let q = self.vgrid.len();
        let n = self.grid.n_cells();
        if f.len() != q * n || out.len() != q * n {
            return Err(Error::argument("state length does not match the grids"));
        }
        let mut feq = vec![0.0; q * n];
        let mut omega = vec![0.0; n];
        if self.cfg.collisions {
            feq.par_chunks_mut(q)
                .zip(omega.par_iter_mut())
                .enumerate()
                .try_for_each(|(j, (fe, w))| -> Result<()> {
                    let st = restrict_cell(
                        &f[j * q..(j + 1) * q],
                        &self.vgrid,
                        &self.gas,
                        self.scale,
                        j,
                    )?;
                    *w = relaxation_frequency_cell(st, &self.gas);
                    self.solver
                        .fill(st, &self.vgrid, &self.gas, self.scale, fe)
                        .map_err(|e| Error::Equilibrium {
                            cell: j,
                            source: Box::new(e),
                        })?;
                    Ok(())
                })?;
        }

        let (ghost_l, ghost_r): (&[f64], &[f64]) = match &self.ghosts {
            Some((l, r)) => (l, r),
            None => (&f[(n - 1) * q..], &f[..q]),
        };
        let v = self.vgrid.velocities();
        let lambda = self.cfg.dt / self.grid.dx();
        let dt = self.cfg.dt;
        let scheme = self.cfg.scheme;
        out.par_chunks_mut(q).enumerate().for_each(|(j, o)| {
            let me = &f[j * q..(j + 1) * q];
            let left = if j == 0 {
                ghost_l
            } else {
                &f[(j - 1) * q..j * q]
            };
            let right = if j + 1 == n {
                ghost_r
            } else {
                &f[(j + 1) * q..(j + 2) * q]
            };
            let fe = &feq[j * q..(j + 1) * q];
            for i in 0..q {
                let vi = v[i];
                let (flux_l, flux_r) = match scheme {
                    FluxScheme::Upwind if vi > 0.0 => (vi * left[i], vi * me[i]),
                    FluxScheme::Upwind => (vi * me[i], vi * right[i]),
                    FluxScheme::Centered => {
                        (0.5 * vi * (left[i] + me[i]), 0.5 * vi * (me[i] + right[i]))
                    }
                };
                o[i] = me[i] - lambda * (flux_r - flux_l) + dt * omega[j] * (fe[i] - me[i]);
            }
        });
        Ok(())
    }
}

/// One step on a field; builds a throwaway [`FvStepper`].
pub fn fv_step(
    f: &DistributionField,
    cfg: &StepConfig,
    gas: &GasParams,
) -> Result<DistributionField> {
    FvStepper::for_field(f, *gas, *cfg)?.step_field(f)
}
