//! Finite-difference Jacobian of the CR map with respect to the
//! unconserved components.
//!
//! Perturbations are taken along the columns of the orthonormal complement
//! `B` of each cell, so the matrix acts on `N (q - k)` reduced coordinates:
//! `J[(j,c), (l,d)] = B_d^T [C(f0 + h B_c e_l) - C(f0)]_j / h`.

use rayon::prelude::*;

use super::{SpectrumParams, SpectrumReport};
use crate::cr::{cr_map, CRConfig};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, norm2, Complex, Mat};
use crate::projection::{ConservedProjector, MomentBasis};
use crate::steppers::MicroStepper;

/// Largest reduced dimension for which the full dense spectrum is computed.
pub const FULL_SPECTRUM_CAP: usize = 2000;

fn reduce(basis: &MomentBasis, x: &[f64]) -> Vec<f64> {
    let b = basis.complement();
    let (q, r) = (b.rows(), b.cols());
    let mut out = Vec::with_capacity(x.len() / q * r);
    for block in x.chunks(q) {
        for c in 0..r {
            out.push((0..q).map(|i| b[(i, c)] * block[i]).sum());
        }
    }
    out
}

fn expand(basis: &MomentBasis, y: &[f64]) -> Vec<f64> {
    let b = basis.complement();
    let (q, r) = (b.rows(), b.cols());
    let mut out = vec![0.0; y.len() / r * q];
    for (block, coords) in out.chunks_mut(q).zip(y.chunks(r)) {
        for (c, &a) in coords.iter().enumerate() {
            for i in 0..q {
                block[i] += a * b[(i, c)];
            }
        }
    }
    out
}

fn fd_step(basis: &MomentBasis, f0: &[f64], cfg: &CRConfig) -> f64 {
    let s_inf = reduce(basis, f0).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    cfg.fd_epsilon * (1.0 + s_inf)
}

fn check_dims(
    stepper: &dyn MicroStepper,
    basis: &MomentBasis,
    proj: &dyn ConservedProjector,
    f0: &[f64],
) -> Result<()> {
    if basis.len() != stepper.block_len() || proj.dim() != stepper.block_len() {
        return Err(Error::argument(
            "basis, projector and stepper disagree on the block size",
        ));
    }
    if f0.len() != stepper.state_len() {
        return Err(Error::argument(
            "f0 does not match the stepper's state length",
        ));
    }
    Ok(())
}

/// Dense reduced Jacobian of `C_m` at `f0`; the map uses `proj` for the reset.
pub fn cr_jacobian(
    stepper: &dyn MicroStepper,
    basis: &MomentBasis,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    cfg: &CRConfig,
) -> Result<Mat> {
    check_dims(stepper, basis, proj, f0)?;
    let r = basis.len() - basis.k_conserved();
    let dim = f0.len() / basis.len() * r;
    if dim > FULL_SPECTRUM_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: FULL_SPECTRUM_CAP,
        });
    }
    let h = fd_step(basis, f0, cfg);
    let base = reduce(basis, &cr_map(stepper, proj, f0, f0, cfg)?);
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|col| -> Result<Vec<f64>> {
            let mut e = vec![0.0; dim];
            e[col] = h;
            let shifted: Vec<f64> = f0
                .iter()
                .zip(expand(basis, &e))
                .map(|(a, b)| a + b)
                .collect();
            let mapped = reduce(basis, &cr_map(stepper, proj, f0, &shifted, cfg)?);
            Ok(mapped.iter().zip(&base).map(|(a, b)| (a - b) / h).collect())
        })
        .collect::<Result<_>>()?;
    Ok(Mat::from_fn(dim, dim, |i, j| columns[j][i]))
}

/// Full spectrum of the reduced CR Jacobian.
pub fn cr_jacobian_spectrum(
    stepper: &dyn MicroStepper,
    basis: &MomentBasis,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    cfg: &CRConfig,
    params: SpectrumParams,
) -> Result<SpectrumReport> {
    let jac = cr_jacobian(stepper, basis, proj, f0, cfg)?;
    Ok(SpectrumReport::from_eigenvalues(
        eigenvalues(&jac)?,
        "cr-jacobian",
        SpectrumParams {
            order: Some(cfg.order()),
            ..params
        },
    ))
}

/// Spectral radius estimate from `krylov_dim` Arnoldi steps with
/// matrix-free Jacobian products; for problems beyond the dense cap.
pub fn cr_jacobian_radius(
    stepper: &dyn MicroStepper,
    basis: &MomentBasis,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    cfg: &CRConfig,
    krylov_dim: usize,
) -> Result<f64> {
    check_dims(stepper, basis, proj, f0)?;
    let r = basis.len() - basis.k_conserved();
    let dim = f0.len() / basis.len() * r;
    let m = krylov_dim.clamp(1, dim);
    let h = fd_step(basis, f0, cfg);
    let base = reduce(basis, &cr_map(stepper, proj, f0, f0, cfg)?);
    let apply = |v: &[f64]| -> Result<Vec<f64>> {
        let shifted: Vec<f64> = f0
            .iter()
            .zip(expand(basis, v))
            .map(|(a, b)| a + h * b)
            .collect();
        let mapped = reduce(basis, &cr_map(stepper, proj, f0, &shifted, cfg)?);
        Ok(mapped.iter().zip(&base).map(|(a, b)| (a - b) / h).collect())
    };

    // deterministic, generic start vector
    let mut v0: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin())
        .collect();
    let n0 = norm2(&v0);
    v0.iter_mut().for_each(|x| *x /= n0);
    let mut basis_v = vec![v0];
    let mut hess = Mat::zeros(m + 1, m);
    let mut steps = m;
    for j in 0..m {
        let mut w = apply(&basis_v[j])?;
        for _ in 0..2 {
            for (i, vi) in basis_v.iter().enumerate() {
                let c = crate::linalg::dot(&w, vi);
                hess[(i, j)] += c;
                crate::linalg::axpy(&mut w, -c, vi);
            }
        }
        let beta = norm2(&w);
        hess[(j + 1, j)] = beta;
        if beta <= 1e-14 * hess.norm_max().max(f64::MIN_POSITIVE) {
            // invariant subspace found; its eigenvalues are exact
            steps = j + 1;
            break;
        }
        w.iter_mut().for_each(|x| *x /= beta);
        basis_v.push(w);
    }
    let square = Mat::from_fn(steps, steps, |i, j| hess[(i, j)]);
    Ok(eigenvalues(&square)?
        .iter()
        .map(Complex::abs)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::naive_projector;
    use crate::steppers::{D1Q3Stepper, IdentityStepper};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_stepper_gives_identity() {
        let basis = MomentBasis::d1q3(1).unwrap();
        let stepper = IdentityStepper {
            block_len: 3,
            blocks: 5,
        };
        let f0 = vec![0.3; 15];
        let cfg = CRConfig::new(0).unwrap();
        let jac = cr_jacobian(&stepper, &basis, &basis, &f0, &cfg).unwrap();
        assert_eq!(jac.rows(), 10);
        assert!(jac.sub(&Mat::identity(10)).norm_max() < 1e-6);
        let rep = cr_jacobian_spectrum(
            &stepper,
            &basis,
            &basis,
            &f0,
            &cfg,
            SpectrumParams::default(),
        )
        .unwrap();
        assert!((rep.spectral_radius - 1.0).abs() < 1e-6);
    }

    /// Column-by-column image of the exact linear CR map.
    fn analytic_jacobian(stepper: &D1Q3Stepper, basis: &MomentBasis, cfg: &CRConfig) -> Mat {
        let n = stepper.sites;
        let dim = 2 * n;
        let zero = vec![0.0; 3 * n];
        let cols: Vec<Vec<f64>> = (0..dim)
            .map(|c| {
                let mut e = vec![0.0; dim];
                e[c] = 1.0;
                let x = expand(basis, &e);
                // with f0 = 0 the reset adds nothing and C is linear in x
                reduce(basis, &cr_map(stepper, basis, &zero, &x, cfg).unwrap())
            })
            .collect();
        Mat::from_fn(dim, dim, |i, j| cols[j][i])
    }

    #[test]
    fn fd_jacobian_matches_linear_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let stepper = D1Q3Stepper::new(6, 1.1).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let f0: Vec<f64> = (0..18).map(|_| rng.gen_range(0.2..1.0)).collect();
        for m in 0..4 {
            let cfg = CRConfig::new(m).unwrap();
            let fd = cr_jacobian(&stepper, &basis, &basis, &f0, &cfg).unwrap();
            let exact = analytic_jacobian(&stepper, &basis, &cfg);
            assert!(fd.sub(&exact).norm_max() < 1e-6, "m={m}");
        }
    }

    #[test]
    fn arnoldi_radius_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let stepper = D1Q3Stepper::new(8, 0.8).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let naive = naive_projector(&basis).unwrap();
        let f0: Vec<f64> = (0..24).map(|_| rng.gen_range(0.2..1.0)).collect();
        let cfg = CRConfig::new(1).unwrap();
        for proj in [&basis as &dyn ConservedProjector, &naive] {
            let dense =
                cr_jacobian_spectrum(&stepper, &basis, proj, &f0, &cfg, SpectrumParams::default())
                    .unwrap();
            let arnoldi = cr_jacobian_radius(&stepper, &basis, proj, &f0, &cfg, 16).unwrap();
            assert!(
                (dense.spectral_radius - arnoldi).abs() < 1e-5,
                "{} {arnoldi}",
                dense.spectral_radius
            );
        }
    }

    #[test]
    fn dense_cap() {
        let stepper = IdentityStepper {
            block_len: 3,
            blocks: 1001,
        };
        let basis = MomentBasis::d1q3(1).unwrap();
        let f0 = vec![1.0; 3003];
        let cfg = CRConfig::new(0).unwrap();
        assert!(matches!(
            cr_jacobian(&stepper, &basis, &basis, &f0, &cfg),
            Err(Error::DimensionCap { .. })
        ));
    }
}
