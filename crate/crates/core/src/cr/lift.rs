use rayon::prelude::*;

use super::{solve_newton, solve_picard, CRConfig, LiftReport, SolverKind};
use crate::error::{Error, Result};
use crate::kinetic::{fill_equilibrium, restrict, DistributionField, GasParams, MacroFields};
use crate::projection::ConservedProjector;
use crate::steppers::FvStepper;

/// Cellwise discrete equilibrium of `macro_fields` on the stepper's grids.
pub fn equilibrium_field(
    stepper: &FvStepper,
    macro_fields: &MacroFields,
) -> Result<DistributionField> {
    let n = stepper.grid().n_cells();
    if macro_fields.len() != n {
        return Err(Error::GridMismatch(format!(
            "{} macro cells for a grid of {n} cells",
            macro_fields.len()
        )));
    }
    let mut f = DistributionField::zeros(
        stepper.grid().clone(),
        stepper.vgrid().clone(),
        stepper.mass_scale(),
    );
    let q = stepper.vgrid().len();
    f.values
        .par_chunks_mut(q)
        .enumerate()
        .try_for_each(|(j, cell)| {
            fill_equilibrium(
                macro_fields.cell(j),
                stepper.vgrid(),
                stepper.gas(),
                stepper.mass_scale(),
                cell,
            )
            .map(|_| ())
            .map_err(|e| Error::Equilibrium {
                cell: j,
                source: Box::new(e),
            })
        })?;
    Ok(f)
}

/// Largest relative deviation of the restricted moments from `target`.
///
/// Velocity is measured against `max(|u|, sqrt(k T / m))` so that cells at
/// rest do not divide by zero.
pub fn moment_drift(f: &DistributionField, target: &MacroFields, gas: &GasParams) -> Result<f64> {
    let got = restrict(f, gas)?;
    let mut worst = 0.0f64;
    for (a, b) in got.states().zip(target.states()) {
        let c = gas.thermal_speed_sq(b.t).sqrt();
        worst = worst
            .max(((a.n - b.n) / b.n).abs())
            .max((a.u - b.u).abs() / b.u.abs().max(c))
            .max(((a.t - b.t) / b.t).abs());
    }
    Ok(worst)
}

fn lift_with(
    stepper: &FvStepper,
    proj: &dyn ConservedProjector,
    macro_fields: &MacroFields,
    cfg: &CRConfig,
    solver: SolverKind,
) -> Result<(DistributionField, LiftReport)> {
    let f0 = equilibrium_field(stepper, macro_fields)?;
    let (values, mut report) = match solver {
        SolverKind::Picard => solve_picard(stepper, proj, &f0.values, None, cfg)?,
        SolverKind::Newton => solve_newton(stepper, proj, &f0.values, None, cfg)?,
    };
    let lifted = DistributionField::new(
        f0.grid.clone(),
        f0.vgrid.clone(),
        values,
        f0.time,
        f0.mass_scale,
    )?;
    report.moment_drift = moment_drift(&lifted, macro_fields, stepper.gas())?;
    Ok((lifted, report))
}

/// Picard CR lifting, starting from the equilibrium of `macro_fields`.
pub fn lift_picard(
    stepper: &FvStepper,
    proj: &dyn ConservedProjector,
    macro_fields: &MacroFields,
    cfg: &CRConfig,
) -> Result<(DistributionField, LiftReport)> {
    lift_with(stepper, proj, macro_fields, cfg, SolverKind::Picard)
}

/// Newton-GMRES CR lifting, starting from the equilibrium of `macro_fields`.
pub fn lift_newton(
    stepper: &FvStepper,
    proj: &dyn ConservedProjector,
    macro_fields: &MacroFields,
    cfg: &CRConfig,
) -> Result<(DistributionField, LiftReport)> {
    lift_with(stepper, proj, macro_fields, cfg, SolverKind::Newton)
}

/// Dispatches on `cfg.solver`.
pub fn lift(
    stepper: &FvStepper,
    proj: &dyn ConservedProjector,
    macro_fields: &MacroFields,
    cfg: &CRConfig,
) -> Result<(DistributionField, LiftReport)> {
    lift_with(stepper, proj, macro_fields, cfg, cfg.solver)
}
