//! Discrete Maxwell-Boltzmann equilibrium.
//!
//! The equilibrium is sought in the form `f_i = A exp(-B^2 (v_i - D)^2)`
//! with `A`, `B`, `D` fixed by requiring the discrete sums over the velocity
//! grid to reproduce `n`, `n u` and `n k_B T / m` exactly. `A` follows from
//! the density once `(B, D)` solve the momentum and energy conditions, which
//! is done by a 2x2 Newton iteration with an analytic Jacobian.
//!
//! Internally the unknowns are made dimensionless with the thermal speed
//! `c = sqrt(k_B T / m)`: `b = B c`, `d = (D - u) / c`, and the residuals are
//! the normalized ratios `R_1 / (c R_0)` and `R_2 / (c^2 R_0) - 1`.

use statrs::function::erf::erfc;

use super::field::MacroState;
use super::gas::GasParams;
use super::grid::VelocityGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumCoeffs {
    /// same units as `f` (before mass rescaling)
    pub a: f64,
    /// s/m
    pub b: f64,
    /// m/s
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSolver {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for EquilibriumSolver {
    fn default() -> Self {
        EquilibriumSolver {
            tol: 1e-12,
            max_iters: 50,
        }
    }
}

/// Discrete equilibrium for one cell, physical units.
pub fn discrete_equilibrium(
    state: MacroState,
    vgrid: &VelocityGrid,
    gas: &GasParams,
) -> Result<(Vec<f64>, EquilibriumCoeffs)> {
    let mut out = vec![0.0; vgrid.len()];
    let coeffs = EquilibriumSolver::default().fill(state, vgrid, gas, 1.0, &mut out)?;
    Ok((out, coeffs))
}

/// Writes the equilibrium times `scale` into `out`.
pub fn fill_equilibrium(
    state: MacroState,
    vgrid: &VelocityGrid,
    gas: &GasParams,
    scale: f64,
    out: &mut [f64],
) -> Result<EquilibriumCoeffs> {
    EquilibriumSolver::default().fill(state, vgrid, gas, scale, out)
}

struct Sums {
    s0: f64,
    s1: f64,
    s2: f64,
    // derivatives with respect to b and d
    s0_b: f64,
    s1_b: f64,
    s2_b: f64,
    s0_d: f64,
    s1_d: f64,
    s2_d: f64,
}

fn sums(x: &[f64], b: f64, d: f64) -> Sums {
    let mut s = Sums {
        s0: 0.0,
        s1: 0.0,
        s2: 0.0,
        s0_b: 0.0,
        s1_b: 0.0,
        s2_b: 0.0,
        s0_d: 0.0,
        s1_d: 0.0,
        s2_d: 0.0,
    };
    let b2 = b * b;
    for &xi in x {
        let y = xi - d;
        let e = (-b2 * y * y).exp();
        let eb = -2.0 * b * y * y * e;
        let ed = 2.0 * b2 * y * e;
        s.s0 += e;
        s.s1 += xi * e;
        s.s2 += xi * xi * e;
        s.s0_b += eb;
        s.s1_b += xi * eb;
        s.s2_b += xi * xi * eb;
        s.s0_d += ed;
        s.s1_d += xi * ed;
        s.s2_d += xi * xi * ed;
    }
    s
}

impl EquilibriumSolver {
    fn residual(s: &Sums) -> (f64, f64) {
        (s.s1 / s.s0, s.s2 / s.s0 - 1.0)
    }

    pub fn fill(
        &self,
        state: MacroState,
        vgrid: &VelocityGrid,
        gas: &GasParams,
        scale: f64,
        out: &mut [f64],
    ) -> Result<EquilibriumCoeffs> {
        let MacroState { n, u, t } = state;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::argument(format!("equilibrium needs n > 0, got {n}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::argument(format!("equilibrium needs T > 0, got {t}")));
        }
        if !u.is_finite() {
            return Err(Error::argument("equilibrium needs a finite velocity"));
        }
        debug_assert_eq!(out.len(), vgrid.len());

        let c = gas.thermal_speed_sq(t).sqrt();
        let x: Vec<f64> = vgrid.velocities().iter().map(|v| (v - u) / c).collect();

        // B = sqrt(m / (2 k_B T)), D = u
        let mut b = std::f64::consts::FRAC_1_SQRT_2;
        let mut d = 0.0;
        let mut s = sums(&x, b, d);
        if !(s.s0 > 0.0) {
            return Err(Error::Numerical(
                "equilibrium weights underflow on this velocity grid".into(),
            ));
        }
        let (mut r1, mut r2) = Self::residual(&s);
        let mut history = Vec::new();
        let mut iters = 0;

        while r1.abs().max(r2.abs()) >= self.tol {
            history.push(r1.abs().max(r2.abs()));
            if iters >= self.max_iters {
                return Err(Error::Convergence {
                    what: "discrete equilibrium Newton solve",
                    iterations: iters,
                    residual: r1.abs().max(r2.abs()),
                    history,
                });
            }
            iters += 1;

            // Jacobian of (s1/s0, s2/s0) with respect to (b, d)
            let inv0 = 1.0 / s.s0;
            let j11 = (s.s1_b - r1 * s.s0_b) * inv0;
            let j12 = (s.s1_d - r1 * s.s0_d) * inv0;
            let j21 = (s.s2_b - (r2 + 1.0) * s.s0_b) * inv0;
            let j22 = (s.s2_d - (r2 + 1.0) * s.s0_d) * inv0;
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                return Err(Error::Numerical("singular equilibrium Jacobian".into()));
            }
            let db = -(j22 * r1 - j12 * r2) / det;
            let dd = -(-j21 * r1 + j11 * r2) / det;

            // backtrack until the residual decreases and b stays positive
            let old = r1.abs().max(r2.abs());
            let mut step = 1.0;
            loop {
                let nb = b + step * db;
                let nd = d + step * dd;
                if nb > 0.0 {
                    let ns = sums(&x, nb, nd);
                    if ns.s0 > 0.0 {
                        let (n1, n2) = Self::residual(&ns);
                        let new = n1.abs().max(n2.abs());
                        if new < old || step < 1e-3 {
                            b = nb;
                            d = nd;
                            s = ns;
                            r1 = n1;
                            r2 = n2;
                            break;
                        }
                    }
                }
                step *= 0.5;
                if step < 1e-6 {
                    return Err(Error::Convergence {
                        what: "discrete equilibrium line search",
                        iterations: iters,
                        residual: old,
                        history,
                    });
                }
            }
        }

        let big_b = b / c;
        let big_d = u + d * c;
        let r0 = vgrid.dv() * s.s0;
        let a = n / r0;
        let b2 = b * b;
        for (o, &xi) in out.iter_mut().zip(&x) {
            let y = xi - d;
            *o = scale * a * (-b2 * y * y).exp();
        }
        Ok(EquilibriumCoeffs {
            a,
            b: big_b,
            d: big_d,
        })
    }
}

/// Continuous one-dimensional Maxwellian evaluated at `v`.
pub fn maxwellian(v: f64, state: MacroState, gas: &GasParams) -> f64 {
    let c2 = gas.thermal_speed_sq(state.t);
    state.n / (2.0 * std::f64::consts::PI * c2).sqrt() * (-(v - state.u).powi(2) / (2.0 * c2)).exp()
}

/// Fraction of the continuous Maxwellian's mass lying outside the grid
/// bounds. Diagnostic only; hot states near the bounds are not rejected.
pub fn truncated_mass_fraction(state: MacroState, vgrid: &VelocityGrid, gas: &GasParams) -> f64 {
    let c = gas.thermal_speed_sq(state.t).sqrt() * std::f64::consts::SQRT_2;
    0.5 * erfc((vgrid.v_max() - state.u) / c) + 0.5 * erfc((state.u - vgrid.v_min()) / c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helium() -> GasParams {
        GasParams::new(6.6464731e-27, 1.9e-5, 273.15, 0.66, 2.19e-10).unwrap()
    }

    /// Direct evaluation of the three defining sums.
    fn moments(f: &[f64], vgrid: &VelocityGrid, u: f64) -> (f64, f64, f64) {
        let dv = vgrid.dv();
        let v = vgrid.velocities();
        let n: f64 = f.iter().sum::<f64>() * dv;
        let nu: f64 = f.iter().zip(v).map(|(fi, vi)| fi * vi).sum::<f64>() * dv;
        let e: f64 = f
            .iter()
            .zip(v)
            .map(|(fi, vi)| fi * (vi - u).powi(2))
            .sum::<f64>()
            * dv;
        (n, nu, e)
    }

    #[test]
    fn ambient_helium_conserves_defining_sums() {
        let gas = helium();
        let t = 300.00785;
        let n = gas.number_density(0.101325e6, t);
        assert!((n / 2.446e25 - 1.0).abs() < 1e-3);
        let vgrid = VelocityGrid::symmetric(9.9875e3, 56).unwrap();
        let (f, coeffs) = discrete_equilibrium(MacroState::new(n, 0.0, t), &vgrid, &gas).unwrap();
        let (n0, nu, e) = moments(&f, &vgrid, 0.0);
        let c = gas.thermal_speed_sq(t).sqrt();
        assert!((n0 / n - 1.0).abs() < 1e-10);
        assert!((nu / (n * c)).abs() < 1e-10);
        assert!((e / (n * gas.thermal_speed_sq(t)) - 1.0).abs() < 1e-10);
        assert!(coeffs.b > 0.0);
        assert!(coeffs.d.abs() < 1e-9 * c);
    }

    #[test]
    fn symmetric_grid_gives_palindrome() {
        let gas = helium();
        let vgrid = VelocityGrid::symmetric(8000.0, 31).unwrap();
        let (f, _) = discrete_equilibrium(MacroState::new(1e25, 0.0, 900.0), &vgrid, &gas).unwrap();
        let fmax = f.iter().cloned().fold(0.0, f64::max);
        for i in 0..f.len() {
            assert!((f[i] - f[f.len() - 1 - i]).abs() < 1e-12 * fmax);
        }
    }

    #[test]
    fn moving_hot_state_converges() {
        let gas = helium();
        let vgrid = VelocityGrid::symmetric(9.9875e3, 24).unwrap();
        let st = MacroState::new(1.6e25, 700.0, 1500.039);
        let (f, _) = discrete_equilibrium(st, &vgrid, &gas).unwrap();
        let (n0, nu, e) = moments(&f, &vgrid, st.u);
        assert!((n0 / st.n - 1.0).abs() < 1e-10);
        assert!((nu / (st.n * st.u) - 1.0).abs() < 1e-10);
        assert!((e / (st.n * gas.thermal_speed_sq(st.t)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_physical_states() {
        let gas = helium();
        let vgrid = VelocityGrid::symmetric(1e4, 16).unwrap();
        assert!(discrete_equilibrium(MacroState::new(0.0, 0.0, 300.0), &vgrid, &gas).is_err());
        assert!(discrete_equilibrium(MacroState::new(1e25, 0.0, -1.0), &vgrid, &gas).is_err());
    }

    #[test]
    fn approaches_maxwellian_as_grid_refines() {
        let gas = helium();
        let st = MacroState::new(2e25, 150.0, 600.0);
        let mut errs = Vec::new();
        // dv halved twice, staying above round-off level
        for nv in [16usize, 32, 64] {
            let vgrid = VelocityGrid::symmetric(1.6e4, nv).unwrap();
            let (f, _) = discrete_equilibrium(st, &vgrid, &gas).unwrap();
            let err = vgrid
                .velocities()
                .iter()
                .zip(&f)
                .map(|(&v, fi)| (fi - maxwellian(v, st, &gas)).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }

    #[test]
    fn truncation_diagnostic() {
        let gas = helium();
        let vgrid = VelocityGrid::symmetric(9.9875e3, 56).unwrap();
        let cold = truncated_mass_fraction(MacroState::new(1e25, 0.0, 300.0), &vgrid, &gas);
        let hot = truncated_mass_fraction(MacroState::new(1e25, 0.0, 30000.0), &vgrid, &gas);
        assert!(cold < 1e-12);
        assert!(hot > 1e-3);
    }
}
