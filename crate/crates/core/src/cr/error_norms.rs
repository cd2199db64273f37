use crate::error::{Error, Result};
use crate::kinetic::DistributionField;

/// Differences between a reference field and a lifted one, in stored units.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftError {
    /// `|f - f_ref|_2` over all cells and velocities.
    pub two_norm: f64,
    /// `sum_i |f_ij - f_ref,ij|` for every cell `j`.
    pub cell_abs_sums: Vec<f64>,
    /// `|f - f_ref| / |f_ref|` per entry, cell-major. `None` where the two
    /// fields agree exactly (the relative error is then identically zero and
    /// has no logarithm); `Some(inf)` where only the reference is zero.
    pub relative: Vec<Option<f64>>,
}

impl LiftError {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn restrict_lift_error(
    reference: &DistributionField,
    lifted: &DistributionField,
) -> Result<LiftError> {
    if !reference.same_grids(lifted) {
        return Err(Error::GridMismatch(format!(
            "reference is {}x{}, lifted is {}x{}",
            reference.n_cells(),
            reference.n_velocities(),
            lifted.n_cells(),
            lifted.n_velocities()
        )));
    }
    if reference.mass_scale != lifted.mass_scale {
        return Err(Error::GridMismatch(
            "fields use different mass scaling".into(),
        ));
    }
    let diff: Vec<f64> = lifted
        .values
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| a - b)
        .collect();
    let q = reference.n_velocities();
    Ok(LiftError {
        two_norm: crate::linalg::norm2(&diff),
        cell_abs_sums: diff
            .chunks(q)
            .map(|c| c.iter().map(|x| x.abs()).sum())
            .collect(),
        relative: diff
            .iter()
            .zip(&reference.values)
            .map(|(&d, &r)| {
                if d == 0.0 {
                    None
                } else {
                    Some(d.abs() / r.abs())
                }
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::{SpatialGrid, VelocityGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(values: Vec<f64>, n: usize, nv: usize) -> DistributionField {
        DistributionField::new(
            SpatialGrid::new(1.0, n).unwrap(),
            VelocityGrid::symmetric(1.0, nv).unwrap(),
            values,
            0.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn identical_fields_have_zero_error() {
        let f = field((0..12).map(|i| i as f64 + 1.0).collect(), 3, 4);
        let e = restrict_lift_error(&f, &f).unwrap();
        assert_eq!(e.two_norm, 0.0);
        assert!(e.relative.iter().all(Option::is_none));
        assert!(e.cell_abs_sums.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (n, nv) = (4, 8);
        let a: Vec<f64> = (0..n * nv).map(|_| rng.gen_range(0.1..2.0)).collect();
        let b: Vec<f64> = (0..n * nv).map(|_| rng.gen_range(0.1..2.0)).collect();
        let e = restrict_lift_error(&field(a.clone(), n, nv), &field(b.clone(), n, nv)).unwrap();
        let mut sq = 0.0;
        for j in 0..n {
            let mut cell = 0.0;
            for i in 0..nv {
                let d = b[j * nv + i] - a[j * nv + i];
                sq += d * d;
                cell += d.abs();
                let rel = e.relative[j * nv + i].unwrap();
                assert!((rel - d.abs() / a[j * nv + i]).abs() < 1e-14 * rel.max(1.0));
            }
            assert!((e.cell_abs_sums[j] - cell).abs() < 1e-14 * cell);
        }
        assert!((e.two_norm - sq.sqrt()).abs() < 1e-14 * sq.sqrt());
    }

    #[test]
    fn grid_mismatch() {
        let a = field(vec![1.0; 8], 2, 4);
        let b = field(vec![1.0; 8], 4, 2);
        assert!(matches!(
            restrict_lift_error(&a, &b),
            Err(Error::GridMismatch(_))
        ));
    }
}
