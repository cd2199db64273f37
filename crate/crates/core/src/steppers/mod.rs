//! Microscopic time integrators.

mod d1q3;
mod fv;

pub use d1q3::{lbm_step, D1Q3Boundary, D1Q3State, D1Q3Stepper};
pub use fv::{fv_step, stable_dt, BoundarySpec, FluxScheme, FvStepper, StepConfig};

use crate::error::Result;

/// A deterministic one-step map on a flat state made of equal-length blocks
/// (one block of populations per spatial cell).
pub trait MicroStepper: Sync {
    /// Populations per block.
    fn block_len(&self) -> usize;

    /// Total state length, a multiple of `block_len`.
    fn state_len(&self) -> usize;

    fn step(&self, state: &[f64], out: &mut [f64]) -> Result<()>;

    /// States after `1..=n_steps` steps.
    fn trajectory(&self, state: &[f64], n_steps: usize) -> Result<Vec<Vec<f64>>> {
        let mut states: Vec<Vec<f64>> = Vec::with_capacity(n_steps);
        let mut current = state.to_vec();
        for _ in 0..n_steps {
            let mut next = vec![0.0; current.len()];
            self.step(&current, &mut next)?;
            states.push(next.clone());
            current = next;
        }
        Ok(states)
    }
}

/// Linear stepper `x -> A x` on a single block; handy for model problems.
#[derive(Debug, Clone)]
pub struct LinearStepper {
    pub matrix: crate::linalg::Mat,
}

impl MicroStepper for LinearStepper {
    fn block_len(&self) -> usize {
        self.matrix.rows()
    }

    fn state_len(&self) -> usize {
        self.matrix.rows()
    }

    fn step(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(&self.matrix.matvec(state));
        Ok(())
    }
}

/// `advance` is a no-op.
#[derive(Debug, Clone, Copy)]
pub struct IdentityStepper {
    pub block_len: usize,
    pub blocks: usize,
}

impl MicroStepper for IdentityStepper {
    fn block_len(&self) -> usize {
        self.block_len
    }

    fn state_len(&self) -> usize {
        self.block_len * self.blocks
    }

    fn step(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(state);
        Ok(())
    }
}
