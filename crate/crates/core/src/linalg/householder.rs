use super::Mat;
use crate::error::{Error, Result};

/// Householder QR factorization `A = Q R` of a tall `rows x cols` matrix.
///
/// The reflectors are kept in compact form; `full_q` expands them into the
/// square orthogonal factor whose trailing columns span the orthogonal
/// complement of `range(A)`.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    rows: usize,
    cols: usize,
    /// Reflector `j` lives in rows `j..rows` of column `j`.
    vectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
    r: Mat,
}

impl HouseholderQr {
    /// Factorizes `a`. Fails when a diagonal entry of `R` drops below
    /// `rank_tol` times the norm of the corresponding input column.
    pub fn new(a: &Mat, rank_tol: f64) -> Result<Self> {
        let (rows, cols) = (a.rows(), a.cols());
        if cols == 0 || cols > rows {
            return Err(Error::argument(format!(
                "QR needs 0 < cols <= rows, got {rows}x{cols}"
            )));
        }
        let col_norms: Vec<f64> = (0..cols).map(|j| super::norm2(&a.column(j))).collect();
        let mut work = a.clone();
        let mut vectors = Vec::with_capacity(cols);
        let mut betas = Vec::with_capacity(cols);

        for j in 0..cols {
            let x: Vec<f64> = (j..rows).map(|i| work[(i, j)]).collect();
            let norm_x = super::norm2(&x);
            let mut v = x;
            let (beta, alpha) = if norm_x == 0.0 {
                (0.0, 0.0)
            } else {
                let alpha = if v[0] >= 0.0 { -norm_x } else { norm_x };
                v[0] -= alpha;
                let vtv = super::dot(&v, &v);
                if vtv == 0.0 {
                    (0.0, alpha)
                } else {
                    (2.0 / vtv, alpha)
                }
            };
            if alpha.abs() <= rank_tol * col_norms[j] || col_norms[j] == 0.0 {
                return Err(Error::RankDeficient {
                    column: j,
                    pivot: alpha.abs(),
                });
            }
            // apply H = I - beta v v^T to the trailing block
            for c in j..cols {
                let s: f64 = (j..rows).map(|i| v[i - j] * work[(i, c)]).sum::<f64>() * beta;
                for i in j..rows {
                    work[(i, c)] -= s * v[i - j];
                }
            }
            work[(j, j)] = alpha;
            for i in (j + 1)..rows {
                work[(i, j)] = 0.0;
            }
            vectors.push(v);
            betas.push(beta);
        }

        let r = Mat::from_fn(cols, cols, |i, j| if i <= j { work[(i, j)] } else { 0.0 });
        Ok(HouseholderQr {
            rows,
            cols,
            vectors,
            betas,
            r,
        })
    }

    pub fn r(&self) -> &Mat {
        &self.r
    }

    /// Applies `Q = H_0 H_1 ... H_{k-1}` to `x` in place.
    pub fn apply_q(&self, x: &mut [f64]) {
        for j in (0..self.cols).rev() {
            self.reflect(j, x);
        }
    }

    /// Applies `Q^T` to `x` in place.
    pub fn apply_qt(&self, x: &mut [f64]) {
        for j in 0..self.cols {
            self.reflect(j, x);
        }
    }

    fn reflect(&self, j: usize, x: &mut [f64]) {
        let v = &self.vectors[j];
        let beta = self.betas[j];
        if beta == 0.0 {
            return;
        }
        let s = beta * super::dot(v, &x[j..]);
        for (xi, vi) in x[j..].iter_mut().zip(v) {
            *xi -= s * vi;
        }
    }

    /// Square orthogonal factor, `rows x rows`.
    pub fn full_q(&self) -> Mat {
        let n = self.rows;
        let mut q = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[c] = 1.0;
            self.apply_q(&mut e);
            for i in 0..n {
                q[(i, c)] = e[i];
            }
        }
        q
    }

    /// Thin factor with `cols` orthonormal columns spanning `range(A)`.
    pub fn thin_q(&self) -> Mat {
        let q = self.full_q();
        Mat::from_fn(self.rows, self.cols, |i, j| q[(i, j)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vandermonde_t(v: &[f64], k: usize) -> Mat {
        Mat::from_fn(v.len(), k, |i, j| v[i].powi(j as i32))
    }

    #[test]
    fn reconstructs_input_and_is_orthonormal() {
        let v: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
        let a = vandermonde_t(&v, 4);
        let qr = HouseholderQr::new(&a, 1e-13).unwrap();
        let q = qr.thin_q();
        let back = q.matmul(qr.r());
        assert!(back.sub(&a).norm_max() < 1e-13 * a.norm_max());
        let qtq = q.transpose().matmul(&q);
        assert!(qtq.sub(&Mat::identity(4)).norm_max() < 1e-14);
        let full = qr.full_q();
        assert!(
            full.transpose()
                .matmul(&full)
                .sub(&Mat::identity(9))
                .norm_max()
                < 1e-14
        );
    }

    #[test]
    fn complement_is_orthogonal_to_range() {
        let v = [1.0, 2.0, 3.0, 5.0, 8.0];
        let a = vandermonde_t(&v, 2);
        let q = HouseholderQr::new(&a, 1e-13).unwrap().full_q();
        for c in 2..5 {
            let col = q.column(c);
            for j in 0..2 {
                assert!(super::super::dot(&col, &a.column(j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detects_dependent_columns() {
        let a = Mat::from_fn(4, 2, |i, _| i as f64 + 1.0);
        assert!(matches!(
            HouseholderQr::new(&a, 1e-12),
            Err(Error::RankDeficient { column: 1, .. })
        ));
    }
}
