//! Scenario files: flat `key = value` text describing the gas, the boundary
//! states, the discretization and the lifting parameters.
//!
//! Only primary inputs are stored. Densities, the mean free path, the domain
//! length, the velocity bounds and the time step are recomputed on demand.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::cr::{CRConfig, SolverKind};
use crate::error::{Error, Result};
use crate::kinetic::{
    fill_equilibrium, mean_free_path, relaxation_frequency_cell, DistributionField, GasParams,
    MacroState, SpatialGrid, VelocityGrid, BOLTZMANN,
};
use crate::projection::{MomentBasis, RowScaling};
use crate::steppers::{stable_dt, BoundarySpec, FluxScheme, FvStepper, StepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Monomial,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub gas: GasParams,
    /// Pa
    pub ambient_p: f64,
    /// K
    pub ambient_t: f64,
    /// m/s
    pub ambient_u: f64,
    /// `p_s = p_a / surface_p_ratio`
    pub surface_p_ratio: f64,
    /// `T_s = T_a / surface_t_ratio`
    pub surface_t_ratio: f64,
    /// explicit surface pressure, overrides the ratio
    pub surface_p: Option<f64>,
    pub surface_t: Option<f64>,
    pub surface_u: f64,
    /// `L = lambda_multiple * lambda(n_s)`
    pub lambda_multiple: f64,
    pub n_cells: usize,
    pub n_velocities: usize,
    /// velocity bounds are `+- bound_multiple * u0`, `u0 = sqrt(2 k T_s / m)`
    pub bound_multiple: f64,
    pub flux: FluxScheme,
    /// safety factor in the time step rule
    pub cfl: f64,
    pub reference_steps: usize,
    /// store `m f` instead of `f`
    pub mass_rescale: bool,
    pub basis: BasisKind,
    pub row_scaling: RowScaling,
    pub k_conserved: usize,
    pub cr_order: usize,
    pub cr_solver: SolverKind,
    pub picard_tol: f64,
    pub max_picard_iters: usize,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub gmres_tol: f64,
    pub gmres_max_iters: usize,
    pub gmres_restart: usize,
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        msg: format!("cannot parse '{value}' for {key}"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config {
            line,
            msg: format!("expected a boolean for {key}, got '{value}'"),
        }),
    }
}

/// Keys without a default; the gas and the boundary states must be spelled out.
const REQUIRED: [&str; 7] = [
    "gas.molecular_mass",
    "gas.molecular_diameter",
    "gas.mu_ref",
    "gas.T_ref",
    "gas.viscosity_index",
    "ambient.p",
    "ambient.T",
];

impl Scenario {
    /// Numerical defaults with the physical inputs unset (NaN).
    fn base() -> Self {
        Scenario {
            name: "unnamed".into(),
            gas: GasParams {
                molecular_mass: f64::NAN,
                boltzmann: BOLTZMANN,
                mu_ref: f64::NAN,
                t_ref: f64::NAN,
                viscosity_index: f64::NAN,
                molecular_diameter: f64::NAN,
            },
            ambient_p: f64::NAN,
            ambient_t: f64::NAN,
            ambient_u: 0.0,
            surface_p_ratio: 1.0,
            surface_t_ratio: 1.0,
            surface_p: None,
            surface_t: None,
            surface_u: 0.0,
            lambda_multiple: 30000.0,
            n_cells: 1600,
            n_velocities: 56,
            bound_multiple: 4.0,
            flux: FluxScheme::Upwind,
            cfl: 0.9,
            reference_steps: 10000,
            mass_rescale: true,
            basis: BasisKind::Monomial,
            row_scaling: RowScaling::Raw,
            k_conserved: 3,
            cr_order: 0,
            cr_solver: SolverKind::Newton,
            picard_tol: 1e-10,
            max_picard_iters: 1000,
            newton_tol: 1e-10,
            max_newton_iters: 30,
            gmres_tol: 1e-6,
            gmres_max_iters: 200,
            gmres_restart: 0,
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    /// Keys not present keep their defaults; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Scenario::base();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected 'key = value', got '{content}'"),
            })?;
            let key = key.trim();
            s.set(line, key, value.trim())?;
            seen.insert(key.to_string());
        }
        if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains(**k)) {
            return Err(Error::Config {
                line: 0,
                msg: format!("missing required key '{missing}'"),
            });
        }
        s.validate()?;
        Ok(s)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        let cfg_err = |msg: String| Error::Config { line, msg };
        match key {
            "scenario.name" => self.name = v.to_string(),
            "gas.molecular_mass" => self.gas.molecular_mass = parse_value(line, key, v)?,
            "gas.molecular_diameter" => self.gas.molecular_diameter = parse_value(line, key, v)?,
            "gas.mu_ref" => self.gas.mu_ref = parse_value(line, key, v)?,
            "gas.T_ref" => self.gas.t_ref = parse_value(line, key, v)?,
            "gas.viscosity_index" => self.gas.viscosity_index = parse_value(line, key, v)?,
            "ambient.p" => self.ambient_p = parse_value(line, key, v)?,
            "ambient.T" => self.ambient_t = parse_value(line, key, v)?,
            "ambient.u" => self.ambient_u = parse_value(line, key, v)?,
            "surface.p_ratio" => self.surface_p_ratio = parse_value(line, key, v)?,
            "surface.T_ratio" => self.surface_t_ratio = parse_value(line, key, v)?,
            "surface.p" => self.surface_p = Some(parse_value(line, key, v)?),
            "surface.T" => self.surface_t = Some(parse_value(line, key, v)?),
            "surface.u" => self.surface_u = parse_value(line, key, v)?,
            "domain.lambda_multiple" => self.lambda_multiple = parse_value(line, key, v)?,
            "grid.N" => self.n_cells = parse_value(line, key, v)?,
            "grid.Nv" => self.n_velocities = parse_value(line, key, v)?,
            "velocity.bound_multiple" => self.bound_multiple = parse_value(line, key, v)?,
            "flux.scheme" => self.flux = v.parse().map_err(|e: Error| cfg_err(e.to_string()))?,
            "time.cfl" => self.cfl = parse_value(line, key, v)?,
            "reference.steps" => self.reference_steps = parse_value(line, key, v)?,
            "field.mass_rescale" => self.mass_rescale = parse_bool(line, key, v)?,
            "basis.kind" => {
                self.basis = match v.to_ascii_lowercase().as_str() {
                    "monomial" => BasisKind::Monomial,
                    "chebyshev" => BasisKind::Chebyshev,
                    other => return Err(cfg_err(format!("unknown basis kind '{other}'"))),
                }
            }
            "basis.row_scaling" => {
                self.row_scaling = match v.to_ascii_lowercase().as_str() {
                    "raw" | "none" => RowScaling::Raw,
                    "unit" | "unit_norm" => RowScaling::UnitNorm,
                    other => return Err(cfg_err(format!("unknown row scaling '{other}'"))),
                }
            }
            "cr.k" => self.k_conserved = parse_value(line, key, v)?,
            "cr.order_m" => self.cr_order = parse_value(line, key, v)?,
            "cr.solver" => self.cr_solver = v.parse().map_err(|e: Error| cfg_err(e.to_string()))?,
            "cr.picard_tol" => self.picard_tol = parse_value(line, key, v)?,
            "cr.max_picard_iters" => self.max_picard_iters = parse_value(line, key, v)?,
            "cr.newton_tol" => self.newton_tol = parse_value(line, key, v)?,
            "cr.max_newton_iters" => self.max_newton_iters = parse_value(line, key, v)?,
            "gmres.tol" => self.gmres_tol = parse_value(line, key, v)?,
            "gmres.max_iters" => self.gmres_max_iters = parse_value(line, key, v)?,
            "gmres.restart" => self.gmres_restart = parse_value(line, key, v)?,
            other => return Err(cfg_err(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        self.gas.validate()?;
        for (name, v) in [
            ("surface.p", self.surface_p.unwrap_or(1.0)),
            ("surface.T", self.surface_t.unwrap_or(1.0)),
            ("ambient.p", self.ambient_p),
            ("ambient.T", self.ambient_t),
            ("surface.p_ratio", self.surface_p_ratio),
            ("surface.T_ratio", self.surface_t_ratio),
            ("domain.lambda_multiple", self.lambda_multiple),
            ("velocity.bound_multiple", self.bound_multiple),
            ("time.cfl", self.cfl),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.n_cells == 0 {
            return bad("grid.N must be at least 1".into());
        }
        if self.n_velocities < 2 {
            return bad("grid.Nv must be at least 2".into());
        }
        if self.k_conserved == 0 || self.k_conserved >= self.n_velocities {
            return bad(format!(
                "cr.k must lie in 1..grid.Nv, got {}",
                self.k_conserved
            ));
        }
        if self.cr_order > crate::cr::MAX_ORDER {
            return bad(format!(
                "cr.order_m must not exceed {}",
                crate::cr::MAX_ORDER
            ));
        }
        Ok(())
    }

    /// All keys in a fixed order; floats use the shortest exact representation.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("scenario.name", self.name.clone());
        kv(
            "gas.molecular_mass",
            format!("{:e}", self.gas.molecular_mass),
        );
        kv(
            "gas.molecular_diameter",
            format!("{:e}", self.gas.molecular_diameter),
        );
        kv("gas.mu_ref", format!("{:e}", self.gas.mu_ref));
        kv("gas.T_ref", self.gas.t_ref.to_string());
        kv("gas.viscosity_index", self.gas.viscosity_index.to_string());
        kv("ambient.p", self.ambient_p.to_string());
        kv("ambient.T", self.ambient_t.to_string());
        kv("ambient.u", self.ambient_u.to_string());
        kv("surface.p_ratio", self.surface_p_ratio.to_string());
        kv("surface.T_ratio", self.surface_t_ratio.to_string());
        if let Some(p) = self.surface_p {
            kv("surface.p", p.to_string());
        }
        if let Some(t) = self.surface_t {
            kv("surface.T", t.to_string());
        }
        kv("surface.u", self.surface_u.to_string());
        kv("domain.lambda_multiple", self.lambda_multiple.to_string());
        kv("grid.N", self.n_cells.to_string());
        kv("grid.Nv", self.n_velocities.to_string());
        kv("velocity.bound_multiple", self.bound_multiple.to_string());
        kv("flux.scheme", self.flux.to_string());
        kv("time.cfl", self.cfl.to_string());
        kv("reference.steps", self.reference_steps.to_string());
        kv("field.mass_rescale", self.mass_rescale.to_string());
        kv(
            "basis.kind",
            match self.basis {
                BasisKind::Monomial => "monomial",
                BasisKind::Chebyshev => "chebyshev",
            }
            .into(),
        );
        kv(
            "basis.row_scaling",
            match self.row_scaling {
                RowScaling::Raw => "raw",
                RowScaling::UnitNorm => "unit",
            }
            .into(),
        );
        kv("cr.k", self.k_conserved.to_string());
        kv("cr.order_m", self.cr_order.to_string());
        kv("cr.solver", self.cr_solver.to_string());
        kv("cr.picard_tol", format!("{:e}", self.picard_tol));
        kv("cr.max_picard_iters", self.max_picard_iters.to_string());
        kv("cr.newton_tol", format!("{:e}", self.newton_tol));
        kv("cr.max_newton_iters", self.max_newton_iters.to_string());
        kv("gmres.tol", format!("{:e}", self.gmres_tol));
        kv("gmres.max_iters", self.gmres_max_iters.to_string());
        kv("gmres.restart", self.gmres_restart.to_string());
        out
    }

    /// SHA-256 of the serialized config, first 16 hex digits.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.serialize().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn ambient_state(&self) -> MacroState {
        MacroState::new(
            self.gas.number_density(self.ambient_p, self.ambient_t),
            self.ambient_u,
            self.ambient_t,
        )
    }

    pub fn surface_state(&self) -> MacroState {
        let p = self
            .surface_p
            .unwrap_or(self.ambient_p / self.surface_p_ratio);
        let t = self
            .surface_t
            .unwrap_or(self.ambient_t / self.surface_t_ratio);
        MacroState::new(self.gas.number_density(p, t), self.surface_u, t)
    }

    /// Mean free path at the surface density.
    pub fn mean_free_path(&self) -> f64 {
        mean_free_path(&self.gas, self.surface_state().n)
    }

    pub fn length(&self) -> f64 {
        self.lambda_multiple * self.mean_free_path()
    }

    /// `sqrt(2 k T_s / m)`
    pub fn u0(&self) -> f64 {
        (2.0 * self.gas.boltzmann * self.surface_state().t / self.gas.molecular_mass).sqrt()
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid> {
        VelocityGrid::symmetric(self.bound_multiple * self.u0(), self.n_velocities)
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.length(), self.n_cells)
    }

    pub fn mass_scale(&self) -> f64 {
        if self.mass_rescale {
            self.gas.molecular_mass
        } else {
            1.0
        }
    }

    /// Relaxation frequency of the initial (ambient) state.
    pub fn initial_omega(&self) -> f64 {
        relaxation_frequency_cell(self.ambient_state(), &self.gas)
    }

    pub fn dt(&self) -> Result<f64> {
        let vgrid = self.velocity_grid()?;
        let grid = self.spatial_grid()?;
        Ok(self.cfl / 0.9 * stable_dt(&vgrid, grid.dx(), &[self.initial_omega()]))
    }

    pub fn step_config(&self) -> Result<StepConfig> {
        Ok(StepConfig::new(
            self.dt()?,
            self.flux,
            BoundarySpec::EquilibriumInflow {
                left: self.surface_state(),
                right: self.ambient_state(),
            },
        ))
    }

    pub fn stepper(&self) -> Result<FvStepper> {
        FvStepper::new(
            self.spatial_grid()?,
            self.velocity_grid()?,
            self.gas,
            self.step_config()?,
            self.mass_scale(),
        )
    }

    /// Ambient equilibrium in every cell.
    pub fn initial_field(&self) -> Result<DistributionField> {
        let grid = self.spatial_grid()?;
        let vgrid = self.velocity_grid()?;
        let mut f = DistributionField::zeros(grid, vgrid, self.mass_scale());
        let mut cell = vec![0.0; self.n_velocities];
        fill_equilibrium(
            self.ambient_state(),
            &f.vgrid,
            &self.gas,
            self.mass_scale(),
            &mut cell,
        )?;
        for j in 0..self.n_cells {
            f.cell_mut(j).copy_from_slice(&cell);
        }
        Ok(f)
    }

    pub fn moment_basis(&self) -> Result<MomentBasis> {
        let vgrid = self.velocity_grid()?;
        match self.basis {
            BasisKind::Monomial => {
                MomentBasis::monomial_scaled(vgrid.velocities(), self.k_conserved, self.row_scaling)
            }
            BasisKind::Chebyshev => MomentBasis::chebyshev(
                vgrid.velocities(),
                vgrid.v_min(),
                vgrid.v_max(),
                self.k_conserved,
            ),
        }
    }

    pub fn cr_config(&self) -> Result<CRConfig> {
        let mut cfg = CRConfig::new(self.cr_order)?.with_solver(self.cr_solver);
        cfg.picard_tol = self.picard_tol;
        cfg.max_picard_iters = self.max_picard_iters;
        cfg.newton_tol = self.newton_tol;
        cfg.max_newton_iters = self.max_newton_iters;
        cfg.gmres.tol = self.gmres_tol;
        cfg.gmres.max_iters = self.gmres_max_iters;
        cfg.gmres.restart = self.gmres_restart;
        Ok(cfg)
    }
}
