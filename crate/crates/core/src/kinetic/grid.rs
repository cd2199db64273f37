use crate::error::{Error, Result};

/// Cell-centred velocity grid `v_i = v_min + dv/2 + i dv`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    v_min: f64,
    v_max: f64,
    dv: f64,
    velocities: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(v_min: f64, v_max: f64, n_velocities: usize) -> Result<Self> {
        if n_velocities < 2 {
            return Err(Error::argument(format!(
                "velocity grid needs at least 2 points, got {n_velocities}"
            )));
        }
        if !(v_min < v_max) || !v_min.is_finite() || !v_max.is_finite() {
            return Err(Error::argument(format!(
                "velocity bounds must satisfy v_min < v_max, got [{v_min}, {v_max}]"
            )));
        }
        let dv = (v_max - v_min) / n_velocities as f64;
        let velocities = (0..n_velocities)
            .map(|i| v_min + 0.5 * dv + i as f64 * dv)
            .collect();
        Ok(VelocityGrid {
            v_min,
            v_max,
            dv,
            velocities,
        })
    }

    /// Symmetric grid on `[-bound, bound]`.
    pub fn symmetric(bound: f64, n_velocities: usize) -> Result<Self> {
        Self::new(-bound, bound, n_velocities)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    #[inline]
    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn max_abs(&self) -> f64 {
        self.velocities.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Uniform finite-volume grid on `[0, length]` with centres `dx/2 + j dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    n_cells: usize,
    dx: f64,
    centers: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::argument("spatial grid needs at least one cell"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::argument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self::with_spacing(length / n_cells as f64, n_cells))
    }

    pub fn with_spacing(dx: f64, n_cells: usize) -> Self {
        SpatialGrid {
            n_cells,
            dx,
            centers: (0..n_cells).map(|j| 0.5 * dx + j as f64 * dx).collect(),
        }
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.dx * self.n_cells as f64
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_grid_is_symmetric() {
        let g = VelocityGrid::new(-1.0, 1.0, 2).unwrap();
        assert_eq!(g.velocities(), &[-0.5, 0.5]);
        assert_eq!(g.dv(), 1.0);
    }

    #[test]
    fn helium_bounds() {
        let g = VelocityGrid::symmetric(9.9875e3, 56).unwrap();
        assert!((g.dv() - 356.696_428_571_428_6).abs() < 1e-9);
        assert!((g.velocities()[0] + 9809.151_785_714_286).abs() < 1e-9);
        assert!(g.velocities().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(VelocityGrid::new(1.0, -1.0, 8).is_err());
        assert!(VelocityGrid::new(-1.0, 1.0, 1).is_err());
        assert!(VelocityGrid::new(-1.0, 1.0, 0).is_err());
        assert!(SpatialGrid::new(1.0, 0).is_err());
        assert!(SpatialGrid::new(-1.0, 4).is_err());
    }

    #[test]
    fn spatial_centres() {
        let g = SpatialGrid::new(2.0, 4).unwrap();
        assert_eq!(g.centers(), &[0.25, 0.75, 1.25, 1.75]);
        assert_eq!(g.length(), 2.0);
    }
}
