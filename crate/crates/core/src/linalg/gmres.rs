use super::{axpy, dot, norm2, scale, Mat};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    /// Relative residual target `|b - Ax| / |b|`.
    pub tol: f64,
    pub max_iters: usize,
    /// Krylov dimension before restarting; 0 disables restarts.
    pub restart: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            tol: 1e-6,
            max_iters: 200,
            restart: 0,
        }
    }
}

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

/// Optional right preconditioner `y = M^{-1} x`; `None` means identity.
pub trait Preconditioner {
    fn apply_inverse(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    /// Total Arnoldi steps over all restart cycles.
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Solves `A x = b` starting from the contents of `x`.
///
/// Does not fail on stagnation: the outcome reports `converged = false`
/// and the caller decides what to do with the partial solution.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    b: &[f64],
    x: &mut [f64],
    cfg: &GmresConfig,
) -> Result<GmresOutcome> {
    let n = op.dim();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);

    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(GmresOutcome {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        });
    }
    let cycle = if cfg.restart == 0 {
        cfg.max_iters.max(1)
    } else {
        cfg.restart
    };

    let mut total = 0usize;
    let mut ax = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut rel;

    loop {
        op.apply(x, &mut ax)?;
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= cfg.tol || total >= cfg.max_iters {
            break;
        }

        let m = cycle.min(cfg.max_iters - total);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut hess = Mat::zeros(m + 1, m);
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        scale(&mut r, 1.0 / beta);
        basis.push(r);

        let mut used = 0;
        for j in 0..m {
            match precond {
                Some(p) => p.apply_inverse(&basis[j], &mut z),
                None => z.copy_from_slice(&basis[j]),
            }
            let mut w = vec![0.0; n];
            op.apply(&z, &mut w)?;
            total += 1;
            used = j + 1;

            // modified Gram-Schmidt with one reorthogonalization pass
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(&w, v);
                    hess[(i, j)] += hij;
                    axpy(&mut w, -hij, v);
                }
            }
            let hnext = norm2(&w);
            hess[(j + 1, j)] = hnext;

            for i in 0..j {
                let t = cs[i] * hess[(i, j)] + sn[i] * hess[(i + 1, j)];
                hess[(i + 1, j)] = -sn[i] * hess[(i, j)] + cs[i] * hess[(i + 1, j)];
                hess[(i, j)] = t;
            }
            let (a, bb) = (hess[(j, j)], hess[(j + 1, j)]);
            let denom = a.hypot(bb);
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = a / denom;
                sn[j] = bb / denom;
            }
            hess[(j, j)] = denom;
            hess[(j + 1, j)] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            rel = g[j + 1].abs() / bnorm;
            if rel <= cfg.tol || hnext == 0.0 {
                break;
            }
            scale(&mut w, 1.0 / hnext);
            basis.push(w);
        }

        // back substitution for the least-squares coefficients
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = ((i + 1)..used).map(|k| hess[(i, k)] * y[k]).sum();
            y[i] = if hess[(i, i)] != 0.0 {
                (g[i] - s) / hess[(i, i)]
            } else {
                0.0
            };
        }
        let mut update = vec![0.0; n];
        for (i, yi) in y.iter().enumerate() {
            axpy(&mut update, *yi, &basis[i]);
        }
        match precond {
            Some(p) => {
                p.apply_inverse(&update, &mut z);
                axpy(x, 1.0, &z);
            }
            None => axpy(x, 1.0, &update),
        }

        if rel <= cfg.tol || total >= cfg.max_iters {
            // recompute the true residual for the report
            op.apply(x, &mut ax)?;
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            rel = norm2(&r) / bnorm;
            break;
        }
    }

    Ok(GmresOutcome {
        iterations: total,
        relative_residual: rel,
        converged: rel <= cfg.tol * 1.0001 + f64::EPSILON,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(Mat);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.rows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
            y.copy_from_slice(&self.0.matvec(x));
            Ok(())
        }
    }

    fn test_matrix(n: usize) -> Mat {
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                4.0 + i as f64 * 0.01
            } else if j == i + 1 {
                -1.0
            } else if i == j + 1 {
                -0.5
            } else {
                0.0
            }
        })
    }

    #[test]
    fn solves_nonsymmetric_system() {
        let a = test_matrix(30);
        let x_true: Vec<f64> = (0..30).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.matvec(&x_true);
        let mut x = vec![0.0; 30];
        let cfg = GmresConfig {
            tol: 1e-12,
            ..Default::default()
        };
        let out = gmres(&Dense(a), None, &b, &mut x, &cfg).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 30);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-10);
        }
    }

    #[test]
    fn restarted_variant_converges() {
        let a = test_matrix(50);
        let b = vec![1.0; 50];
        let mut x = vec![0.0; 50];
        let cfg = GmresConfig {
            tol: 1e-10,
            max_iters: 400,
            restart: 5,
        };
        let out = gmres(&Dense(a.clone()), None, &b, &mut x, &cfg).unwrap();
        assert!(out.converged, "{out:?}");
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) < 1e-9 * norm2(&b));
    }

    #[test]
    fn identity_needs_one_iteration() {
        let out = gmres(
            &Dense(Mat::identity(8)),
            None,
            &[1.0; 8],
            &mut [0.0; 8],
            &GmresConfig::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }
}
