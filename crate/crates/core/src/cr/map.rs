use super::CRConfig;
use crate::error::{Error, Result};
use crate::projection::ConservedProjector;
use crate::steppers::MicroStepper;

/// One application of `C_m`: run `m + 1` steps from `guess`, extrapolate,
/// reset the conserved content to that of `f0`.
pub fn cr_map(
    stepper: &dyn MicroStepper,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    guess: &[f64],
    cfg: &CRConfig,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; guess.len()];
    cr_map_into(stepper, proj, f0, guess, cfg, &mut out)?;
    Ok(out)
}

pub fn cr_map_into(
    stepper: &dyn MicroStepper,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    guess: &[f64],
    cfg: &CRConfig,
    out: &mut [f64],
) -> Result<()> {
    let len = stepper.state_len();
    let q = stepper.block_len();
    if f0.len() != len || guess.len() != len || out.len() != len {
        return Err(Error::argument(format!(
            "state length mismatch: stepper {len}, f0 {}, guess {}",
            f0.len(),
            guess.len()
        )));
    }
    if proj.dim() != q {
        return Err(Error::argument(format!(
            "projector acts on {} populations, stepper blocks have {q}",
            proj.dim()
        )));
    }

    let mut pre = vec![0.0; len];
    let mut cur = guess.to_vec();
    let mut next = vec![0.0; len];
    for &w in cfg.weights() {
        stepper.step(&cur, &mut next)?;
        for (p, x) in pre.iter_mut().zip(&next) {
            *p += w * x;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    if let Some(pos) = pre.iter().position(|x| !x.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite extrapolated state at block {}, entry {} (order {})",
            pos / q,
            pos % q,
            cfg.order()
        )));
    }

    for ((o, p), z) in out.chunks_mut(q).zip(pre.chunks(q)).zip(f0.chunks(q)) {
        proj.reset(p, z, o);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::projection::{naive_projector, MomentBasis};
    use crate::steppers::{D1Q3Stepper, LinearStepper};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn steady_state_is_fixed_point() {
        let stepper = D1Q3Stepper::new(6, 1.2).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let f0 = vec![0.25; 18];
        for m in 0..4 {
            let cfg = CRConfig::new(m).unwrap();
            let out = cr_map(&stepper, &basis, &f0, &f0, &cfg).unwrap();
            for (a, b) in out.iter().zip(&f0) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn polynomial_trajectories_are_extrapolated_exactly() {
        // x_k = (I + N)^k x_0 with N^(m+1) = 0 is a degree-m polynomial in k
        for m in 0..4usize {
            let q = m + 2;
            let step = Mat::from_fn(q, q, |i, j| {
                if i == j {
                    1.0
                } else if j == i + 1 && i >= 1 {
                    0.3
                } else {
                    0.0
                }
            });
            let stepper = LinearStepper { matrix: step };
            let basis = MomentBasis::from_matrix(Mat::identity(q), 1).unwrap();
            let cfg = CRConfig::new(m).unwrap();
            let x0: Vec<f64> = (0..q).map(|i| 1.0 + i as f64).collect();
            let out = cr_map(&stepper, &basis, &x0, &x0, &cfg).unwrap();
            for (a, b) in out.iter().zip(&x0) {
                assert!((a - b).abs() < 1e-12, "m={m}: {out:?}");
            }
        }
    }

    #[test]
    fn output_carries_conserved_density_of_f0() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let stepper = D1Q3Stepper::new(8, 0.9).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let naive = naive_projector(&basis).unwrap();
        for m in 0..4 {
            let cfg = CRConfig::new(m).unwrap();
            let f0: Vec<f64> = (0..24).map(|_| rng.gen_range(0.1..1.0)).collect();
            let guess: Vec<f64> = (0..24).map(|_| rng.gen_range(0.1..1.0)).collect();
            for proj in [&basis as &dyn ConservedProjector, &naive] {
                let out = cr_map(&stepper, proj, &f0, &guess, &cfg).unwrap();
                for (o, z) in out.chunks(3).zip(f0.chunks(3)) {
                    let (ro, rz): (f64, f64) = (o.iter().sum(), z.iter().sum());
                    assert!((ro - rz).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let stepper = D1Q3Stepper::new(2, 1.0).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let cfg = CRConfig::new(0).unwrap();
        assert!(cr_map(&stepper, &basis, &[1.0; 6], &[1.0; 3], &cfg).is_err());
    }
}
