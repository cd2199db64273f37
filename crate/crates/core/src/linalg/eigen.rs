//! Eigenvalues of a dense real nonsymmetric matrix: diagonal balancing,
//! Householder reduction to upper Hessenberg form, then the Francis
//! double-shift QR iteration (EISPACK `balanc`/`orthes`/`hqr` lineage).

use super::Mat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of `a`, in no particular order.
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::argument("eigenvalues need a square matrix"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(
            "non-finite entry in eigenvalue input".into(),
        ));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&mut h)
}

/// `min |A v - lambda v| / |v|` estimate from two steps of inverse
/// iteration, in complex arithmetic through the real `2n x 2n` embedding.
/// Small values confirm that `lambda` is an eigenvalue of `a`.
pub fn eigenpair_residual(a: &Mat, lambda: Complex) -> Result<f64> {
    let n = a.rows();
    // shift slightly off the eigenvalue so the factorization stays regular
    let scale = a.norm_one().max(f64::MIN_POSITIVE);
    let shift = Complex::new(lambda.re + 1e-10 * scale, lambda.im);
    let big = Mat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        let diag = if ii == jj { 1.0 } else { 0.0 };
        match (bi, bj) {
            (0, 0) | (1, 1) => a[(ii, jj)] - shift.re * diag,
            (0, 1) => shift.im * diag,
            _ => -shift.im * diag,
        }
    });
    let lu = super::Lu::new(&big)?;
    let mut x: Vec<f64> = (0..2 * n).map(|i| 1.0 + (i as f64 * 0.618).sin()).collect();
    for _ in 0..2 {
        x = lu.solve(&x);
        let nrm = super::norm2(&x);
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    let (xr, xi) = x.split_at(n);
    let (ar, ai) = (a.matvec(xr), a.matvec(xi));
    let mut res = 0.0;
    for i in 0..n {
        let rr = ar[i] - (lambda.re * xr[i] - lambda.im * xi[i]);
        let ri = ai[i] - (lambda.re * xi[i] + lambda.im * xr[i]);
        res += rr * rr + ri * ri;
    }
    Ok(res.sqrt())
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Eigenvalues are unchanged.
pub fn balance(a: &mut Mat) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// In-place orthogonal reduction to upper Hessenberg form.
pub fn hessenberg(h: &mut Mat) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
        for i in (m + 1)..=high {
            h[(i, m - 1)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Eigenvalues only,
/// so the transformations are restricted to the active window.
fn hqr(h: &mut Mat) -> Result<Vec<Complex>> {
    let nn = h.rows();
    let eps = f64::EPSILON;
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
    let mut iter = 0usize;
    let mut n = nn as isize - 1;

    while n >= 0 {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            d[nu] = h[(nu, nu)] + exshift;
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            let w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            let x = h[(nu, nu)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = if z != 0.0 { x - w / z } else { x + z };
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            let mut x = h[(nu, nu)];
            let mut y = h[(nu - 1, nu - 1)];
            let mut w = h[(nu, nu - 1)] * h[(nu - 1, nu)];

            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::Convergence {
                    what: "Hessenberg QR iteration",
                    iterations: iter,
                    residual: h[(nu, nu - 1)].abs(),
                    history: Vec::new(),
                });
            }

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // double QR step on rows l..=n, columns m..=n
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[(k, k - 1)] = -s * x;
                } else if l != m {
                    h[(k, k - 1)] = -h[(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for j in k..=nu {
                    p = h[(k, j)] + q * h[(k + 1, j)];
                    if notlast {
                        p += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= p * z;
                    }
                    h[(k, j)] -= p * x;
                    h[(k + 1, j)] -= p * y;
                }
                for i in l..=nu.min(k + 3) {
                    p = x * h[(i, k)] + y * h[(i, k + 1)];
                    if notlast {
                        p += z * h[(i, k + 2)];
                        h[(i, k + 2)] -= p * r;
                    }
                    h[(i, k)] -= p;
                    h[(i, k + 1)] -= p * q;
                }
            }
        }
    }

    Ok(d.into_iter()
        .zip(e)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.into_iter().map(|c| c.re).collect()
    }

    #[test]
    fn triangular_matrix_gives_its_diagonal() {
        let a = Mat::from_fn(5, 5, |i, j| {
            if j >= i {
                (i + 1) as f64 + j as f64 * 0.1
            } else {
                0.0
            }
        });
        let ev = sorted_re(eigenvalues(&a).unwrap());
        for (i, &l) in ev.iter().enumerate() {
            assert!((l - (i + 1) as f64 - i as f64 * 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = Mat::from_row_major(2, 2, vec![0.0, -2.0, 2.0, 0.0]);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev
            .iter()
            .all(|c| c.re.abs() < 1e-15 && (c.im.abs() - 2.0).abs() < 1e-15));
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let coeffs = [-24.0, 50.0, -35.0, 10.0];
        let a = Mat::from_fn(4, 4, |i, j| {
            if j == 3 {
                coeffs[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let ev = sorted_re(eigenvalues(&a).unwrap());
        for (i, &l) in ev.iter().enumerate() {
            assert!((l - (i + 1) as f64).abs() < 1e-10, "{ev:?}");
        }
    }

    #[test]
    fn trace_matches_sum_for_random_matrix() {
        let n = 40;
        let mut seed = 12345u64;
        let a = Mat::from_fn(n, n, |_, _| {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let ev = eigenvalues(&a).unwrap();
        let sum_re: f64 = ev.iter().map(|c| c.re).sum();
        let sum_im: f64 = ev.iter().map(|c| c.im).sum();
        assert!((sum_re - a.trace()).abs() < 1e-11);
        assert!(sum_im.abs() < 1e-11);
    }
}
