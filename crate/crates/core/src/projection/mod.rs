//! Moment matrices and the projectors used to reset conserved moments.
//!
//! A [`MomentBasis`] holds the square moment matrix `M` (populations to
//! moments) and an orthonormal basis `Q` of the span of its first `k` rows,
//! obtained from a Householder QR of the transposed conserved block. The
//! orthogonal projector `I - Q Q^T` is applied in factored form. The
//! inverse-based projector `I - M^{-1} M^0` is available separately through
//! [`naive_projector`] for comparison studies.

mod basis;
mod naive;

pub use basis::{MomentBasis, MomentKind, RowScaling};
pub use naive::{naive_projector, NaiveProjector};

use crate::linalg::Mat;

/// A projector onto the unconserved subspace of one cell's populations.
pub trait ConservedProjector: Send + Sync {
    /// Number of populations per cell.
    fn dim(&self) -> usize;

    /// `out = P f`.
    fn project(&self, f: &[f64], out: &mut [f64]);

    /// `out = P f_pre + (I - P) f0`: keeps the unconserved content of
    /// `f_pre` and takes the conserved content from `f0`.
    fn reset(&self, f_pre: &[f64], f0: &[f64], out: &mut [f64]) {
        let q = self.dim();
        let diff: Vec<f64> = f_pre.iter().zip(f0).map(|(a, b)| a - b).collect();
        let mut pd = vec![0.0; q];
        self.project(&diff, &mut pd);
        for i in 0..q {
            out[i] = f0[i] + pd[i];
        }
    }

    /// Dense `q x q` matrix of `P`.
    fn materialize(&self) -> Mat {
        let q = self.dim();
        let mut p = Mat::zeros(q, q);
        let mut e = vec![0.0; q];
        let mut col = vec![0.0; q];
        for c in 0..q {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[c] = 1.0;
            self.project(&e, &mut col);
            for i in 0..q {
                p[(i, c)] = col[i];
            }
        }
        p
    }
}
