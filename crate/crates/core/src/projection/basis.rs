use super::ConservedProjector;
use crate::error::{Error, Result};
use crate::linalg::{HouseholderQr, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// Row `r` is `v_i^r` (transposed Vandermonde).
    Monomial,
    /// Row `r` is `T_r(v~_i)`, `v~` the affine image of the grid bounds on `[-1, 1]`.
    Chebyshev,
    /// The three-speed lattice matrix on populations `(f_1, f_0, f_-1)`.
    D1Q3,
    /// Caller-supplied square matrix.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowScaling {
    #[default]
    Raw,
    /// Every row of `M` normalized to unit 2-norm. Leaves `span(Q)` unchanged.
    UnitNorm,
}

const RANK_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct MomentBasis {
    kind: MomentKind,
    moments: Mat,
    k: usize,
    q_thin: Mat,
    complement: Mat,
    r: Mat,
}

impl MomentBasis {
    pub fn monomial(velocities: &[f64], k: usize) -> Result<Self> {
        Self::monomial_scaled(velocities, k, RowScaling::Raw)
    }

    pub fn monomial_scaled(velocities: &[f64], k: usize, scaling: RowScaling) -> Result<Self> {
        check_distinct(velocities)?;
        let q = velocities.len();
        let m = Mat::from_fn(q, q, |r, i| velocities[i].powi(r as i32));
        Self::build(MomentKind::Monomial, apply_scaling(m, scaling), k)
    }

    pub fn chebyshev(velocities: &[f64], v_min: f64, v_max: f64, k: usize) -> Result<Self> {
        check_distinct(velocities)?;
        if !(v_min < v_max) {
            return Err(Error::argument("Chebyshev basis needs v_min < v_max"));
        }
        let q = velocities.len();
        let mid = 0.5 * (v_max + v_min);
        let half = 0.5 * (v_max - v_min);
        let mut m = Mat::zeros(q, q);
        for (i, &v) in velocities.iter().enumerate() {
            let x = (v - mid) / half;
            let (mut t_prev, mut t) = (1.0, x);
            m[(0, i)] = 1.0;
            if q > 1 {
                m[(1, i)] = x;
            }
            for r in 2..q {
                let next = 2.0 * x * t - t_prev;
                t_prev = t;
                t = next;
                m[(r, i)] = t;
            }
        }
        Self::build(MomentKind::Chebyshev, m, k)
    }

    /// Lattice matrix `[[1,1,1],[1,0,-1],[1/2,0,1/2]]`.
    pub fn d1q3(k: usize) -> Result<Self> {
        let m = Mat::from_row_major(3, 3, vec![1.0, 1.0, 1.0, 1.0, 0.0, -1.0, 0.5, 0.0, 0.5]);
        Self::build(MomentKind::D1Q3, m, k)
    }

    pub fn from_matrix(moments: Mat, k: usize) -> Result<Self> {
        Self::build(MomentKind::Custom, moments, k)
    }

    fn build(kind: MomentKind, moments: Mat, k: usize) -> Result<Self> {
        let q = moments.rows();
        if moments.cols() != q {
            return Err(Error::argument("moment matrix must be square"));
        }
        if k == 0 || k >= q {
            return Err(Error::argument(format!(
                "number of conserved moments must satisfy 1 <= k < q, got k={k}, q={q}"
            )));
        }
        // (M^0)^T(:, 1:k): the conserved rows as columns
        let conserved = Mat::from_fn(q, k, |i, j| moments[(j, i)]);
        let qr = HouseholderQr::new(&conserved, RANK_TOL)?;
        let full = qr.full_q();
        let q_thin = Mat::from_fn(q, k, |i, j| full[(i, j)]);
        let complement = Mat::from_fn(q, q - k, |i, j| full[(i, k + j)]);
        Ok(MomentBasis {
            kind,
            moments,
            k,
            q_thin,
            complement,
            r: qr.r().clone(),
        })
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    /// Populations per cell.
    pub fn len(&self) -> usize {
        self.moments.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn k_conserved(&self) -> usize {
        self.k
    }

    pub fn moment_matrix(&self) -> &Mat {
        &self.moments
    }

    /// `M` with rows `k..q` zeroed.
    pub fn conserved_block(&self) -> Mat {
        Mat::from_fn(self.len(), self.len(), |r, c| {
            if r < self.k {
                self.moments[(r, c)]
            } else {
                0.0
            }
        })
    }

    /// `q x k`, orthonormal columns spanning the conserved rows.
    pub fn q(&self) -> &Mat {
        &self.q_thin
    }

    /// `k x k` upper triangular factor with `M^0(1:k,:) = R^T Q^T`.
    pub fn r(&self) -> &Mat {
        &self.r
    }

    /// `q x (q-k)`, orthonormal basis of the unconserved subspace.
    pub fn complement(&self) -> &Mat {
        &self.complement
    }

    /// `Q^T f`.
    pub fn conserved_coords(&self, f: &[f64]) -> Vec<f64> {
        let q = self.len();
        (0..self.k)
            .map(|j| (0..q).map(|i| self.q_thin[(i, j)] * f[i]).sum())
            .collect()
    }

    /// First `k` raw moments `M(1:k,:) f`.
    pub fn conserved_moments(&self, f: &[f64]) -> Vec<f64> {
        (0..self.k)
            .map(|r| crate::linalg::dot(self.moments.row(r), f))
            .collect()
    }

    /// `P^ f = f - Q (Q^T f)`.
    pub fn project_complement(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.project(f, &mut out);
        out
    }

    /// `P^ f_pre + (I - P^) f0`.
    pub fn reset_conserved(&self, f_pre: &[f64], f0: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.reset(f_pre, f0, &mut out);
        out
    }
}

impl ConservedProjector for MomentBasis {
    fn dim(&self) -> usize {
        self.len()
    }

    fn project(&self, f: &[f64], out: &mut [f64]) {
        let coords = self.conserved_coords(f);
        out.copy_from_slice(f);
        for (j, c) in coords.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o -= self.q_thin[(i, j)] * c;
            }
        }
    }

    fn reset(&self, f_pre: &[f64], f0: &[f64], out: &mut [f64]) {
        // f_pre - Q Q^T f_pre + Q Q^T f0
        let q = self.len();
        let mut delta = vec![0.0; self.k];
        for (j, d) in delta.iter_mut().enumerate() {
            *d = (0..q)
                .map(|i| self.q_thin[(i, j)] * (f0[i] - f_pre[i]))
                .sum();
        }
        out.copy_from_slice(f_pre);
        for (j, d) in delta.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.q_thin[(i, j)] * d;
            }
        }
    }
}

fn check_distinct(velocities: &[f64]) -> Result<()> {
    let mut sorted = velocities.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("velocities must not be NaN"));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::argument(format!("duplicate velocity {}", w[0])));
    }
    Ok(())
}

fn apply_scaling(mut m: Mat, scaling: RowScaling) -> Mat {
    if scaling == RowScaling::UnitNorm {
        for r in 0..m.rows() {
            let norm = crate::linalg::norm2(m.row(r));
            if norm > 0.0 {
                m.row_mut(r).iter_mut().for_each(|x| *x /= norm);
            }
        }
    }
    m
}
