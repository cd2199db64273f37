use log::warn;

use crate::cr::{solve_newton, CRConfig};
use crate::error::Result;
use crate::projection::ConservedProjector;
use crate::steppers::MicroStepper;

/// One configuration of a sweep: stepper, projector and target state.
pub struct SweepCase {
    pub stepper: Box<dyn MicroStepper>,
    pub projector: Box<dyn ConservedProjector>,
    pub f0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_cells: usize,
    pub order: usize,
    /// GMRES steps summed over all Newton iterations.
    pub gmres_iterations: usize,
    pub newton_iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// Newton-GMRES lifting for every `(N, m)` pair. Failures become rows with
/// `converged = false` and the error message.
pub fn gmres_iteration_sweep(
    setup: &dyn Fn(usize) -> Result<SweepCase>,
    orders: &[usize],
    grid_sizes: &[usize],
    base_cfg: &CRConfig,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(orders.len() * grid_sizes.len());
    for &n in grid_sizes {
        let case = match setup(n) {
            Ok(c) => c,
            Err(e) => {
                warn!("sweep setup failed for N={n}: {e}");
                for &m in orders {
                    rows.push(SweepRow {
                        n_cells: n,
                        order: m,
                        gmres_iterations: 0,
                        newton_iterations: 0,
                        converged: false,
                        error: Some(e.to_string()),
                    });
                }
                continue;
            }
        };
        for &m in orders {
            let mut cfg = base_cfg.clone();
            cfg.set_order(m)?;
            let row = match solve_newton(
                case.stepper.as_ref(),
                case.projector.as_ref(),
                &case.f0,
                None,
                &cfg,
            ) {
                Ok((_, report)) => SweepRow {
                    n_cells: n,
                    order: m,
                    gmres_iterations: report.gmres_iterations,
                    newton_iterations: report.iterations,
                    converged: true,
                    error: None,
                },
                Err(e) => {
                    warn!("sweep N={n} m={m} failed: {e}");
                    SweepRow {
                        n_cells: n,
                        order: m,
                        gmres_iterations: 0,
                        newton_iterations: 0,
                        converged: false,
                        error: Some(e.to_string()),
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::projection::MomentBasis;
    use crate::steppers::IdentityStepper;

    #[test]
    fn identity_rows_are_trivial_and_failures_recorded() {
        let setup = |n: usize| -> Result<SweepCase> {
            if n == 0 {
                return Err(Error::argument("empty grid"));
            }
            Ok(SweepCase {
                stepper: Box::new(IdentityStepper {
                    block_len: 3,
                    blocks: n,
                }),
                projector: Box::new(MomentBasis::d1q3(1)?),
                f0: vec![1.0; 3 * n],
            })
        };
        let cfg = CRConfig::new(0).unwrap();
        let rows = gmres_iteration_sweep(&setup, &[0, 1], &[0, 4, 8], &cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(!rows[0].converged && rows[0].error.is_some());
        for r in &rows[2..] {
            assert!(r.converged);
            assert_eq!(r.gmres_iterations, 0);
            assert!(r.newton_iterations <= 1);
        }
    }
}
