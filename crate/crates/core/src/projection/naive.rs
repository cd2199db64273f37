use super::{ConservedProjector, MomentBasis};
use crate::error::Result;
use crate::linalg::{Lu, Mat};

/// `P = I - M^{-1} M^0` formed with an explicit dense inverse.
///
/// For Vandermonde-type `M` on realistic velocity grids the inverse is
/// numerically meaningless and `P` stops being a projector; this type exists
/// to reproduce that failure.
#[derive(Debug, Clone)]
pub struct NaiveProjector {
    p: Mat,
    condition: f64,
}

pub fn naive_projector(basis: &MomentBasis) -> Result<NaiveProjector> {
    let m = basis.moment_matrix();
    let inv = Lu::new(m)?.inverse();
    let product = inv.matmul(&basis.conserved_block());
    let p = Mat::identity(m.rows()).sub(&product);
    // the inverse is explicit, so the 1-norm condition number is exact for it
    let condition = m.norm_one() * inv.norm_one();
    Ok(NaiveProjector { p, condition })
}

impl NaiveProjector {
    pub fn matrix(&self) -> &Mat {
        &self.p
    }

    /// `||M||_1 ||M^{-1}||_1` with the computed inverse.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }
}

impl ConservedProjector for NaiveProjector {
    fn dim(&self) -> usize {
        self.p.rows()
    }

    fn project(&self, f: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = crate::linalg::dot(self.p.row(i), f);
        }
    }

    fn materialize(&self) -> Mat {
        self.p.clone()
    }
}
