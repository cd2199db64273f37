use std::time::Instant;

use log::{debug, warn};

use super::{cr_map_into, CRConfig};
use crate::error::{Error, Result};
use crate::linalg::{gmres, norm2, LinearOperator};
use crate::projection::ConservedProjector;
use crate::steppers::MicroStepper;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    /// Largest relative change of the conserved content over all blocks.
    pub drift: f64,
    pub seconds: f64,
    /// GMRES steps spent in this iteration (0 for Picard).
    pub gmres_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LiftReport {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<IterationRecord>,
    /// Filled in by the field-level drivers from the restricted moments.
    pub moment_drift: f64,
    pub gmres_iterations: usize,
    pub seconds: f64,
    pub converged: bool,
}

impl LiftReport {
    pub fn residuals(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.residual).collect()
    }
}

fn project_blocks(proj: &dyn ConservedProjector, x: &[f64], out: &mut [f64]) {
    let q = proj.dim();
    for (o, b) in out.chunks_mut(q).zip(x.chunks(q)) {
        proj.project(b, o);
    }
}

/// `max_blocks |(I-P)(f - f0)| / |(I-P) f0|`.
fn conserved_drift(proj: &dyn ConservedProjector, f: &[f64], f0: &[f64]) -> f64 {
    let q = proj.dim();
    let mut pd = vec![0.0; q];
    let mut pz = vec![0.0; q];
    let mut worst = 0.0f64;
    for (b, z) in f.chunks(q).zip(f0.chunks(q)) {
        let d: Vec<f64> = b.iter().zip(z).map(|(x, y)| x - y).collect();
        proj.project(&d, &mut pd);
        proj.project(z, &mut pz);
        let cd: Vec<f64> = d.iter().zip(&pd).map(|(x, y)| x - y).collect();
        let cz: Vec<f64> = z.iter().zip(&pz).map(|(x, y)| x - y).collect();
        let denom = norm2(&cz);
        let num = norm2(&cd);
        if denom > 0.0 {
            worst = worst.max(num / denom);
        } else {
            worst = worst.max(num);
        }
    }
    worst
}

fn convergence_error(what: &'static str, report: &LiftReport) -> Error {
    Error::Convergence {
        what,
        iterations: report.iterations,
        residual: report.residual,
        history: report.residuals(),
    }
}

/// Fixed-point iteration `f <- C_m(f)` from `guess` (default `f0`).
///
/// On failure the error carries the residual history.
pub fn solve_picard(
    stepper: &dyn MicroStepper,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    guess: Option<&[f64]>,
    cfg: &CRConfig,
) -> Result<(Vec<f64>, LiftReport)> {
    let start = Instant::now();
    let len = f0.len();
    let mut f = guess.unwrap_or(f0).to_vec();
    let mut next = vec![0.0; len];
    let mut delta = vec![0.0; len];
    let mut pdelta = vec![0.0; len];
    let mut report = LiftReport::default();

    for iter in 1..=cfg.max_picard_iters {
        cr_map_into(stepper, proj, f0, &f, cfg, &mut next)?;
        for ((d, a), b) in delta.iter_mut().zip(&next).zip(&f) {
            *d = a - b;
        }
        project_blocks(proj, &delta, &mut pdelta);
        let residual = norm2(&pdelta);
        std::mem::swap(&mut f, &mut next);

        report.iterations = iter;
        report.residual = residual;
        report.history.push(IterationRecord {
            iter,
            residual,
            drift: conserved_drift(proj, &f, f0),
            seconds: start.elapsed().as_secs_f64(),
            gmres_iterations: 0,
        });
        debug!("picard {iter}: |ds| = {residual:e}");
        if !residual.is_finite() {
            report.seconds = start.elapsed().as_secs_f64();
            return Err(convergence_error("Picard iteration", &report));
        }
        if residual < cfg.picard_tol {
            report.converged = true;
            report.seconds = start.elapsed().as_secs_f64();
            return Ok((f, report));
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    Err(convergence_error("Picard iteration", &report))
}

/// Residual `g(s) = s - P C_m(s + (I - P) f0)` and friends.
struct Residual<'a> {
    stepper: &'a dyn MicroStepper,
    proj: &'a dyn ConservedProjector,
    f0: &'a [f64],
    /// `(I - P) f0`
    fixed: Vec<f64>,
    cfg: &'a CRConfig,
}

impl Residual<'_> {
    fn state(&self, s: &[f64]) -> Vec<f64> {
        s.iter().zip(&self.fixed).map(|(a, b)| a + b).collect()
    }

    /// `P C_m(state(s))`.
    fn projected_map(&self, s: &[f64]) -> Result<Vec<f64>> {
        let state = self.state(s);
        let mut mapped = vec![0.0; s.len()];
        cr_map_into(
            self.stepper,
            self.proj,
            self.f0,
            &state,
            self.cfg,
            &mut mapped,
        )?;
        let mut out = vec![0.0; s.len()];
        project_blocks(self.proj, &mapped, &mut out);
        Ok(out)
    }
}

/// Forward-difference action of `I - dC/ds` around `s`.
struct JacobianOp<'a> {
    residual: &'a Residual<'a>,
    s: &'a [f64],
    base: &'a [f64],
    fd_epsilon: f64,
    s_inf: f64,
}

impl LinearOperator for JacobianOp<'_> {
    fn dim(&self) -> usize {
        self.s.len()
    }

    fn apply(&self, v: &[f64], y: &mut [f64]) -> Result<()> {
        let vnorm = norm2(v);
        if vnorm == 0.0 {
            y.iter_mut().for_each(|x| *x = 0.0);
            return Ok(());
        }
        let h = self.fd_epsilon * (1.0 + self.s_inf) / vnorm;
        let shifted: Vec<f64> = self.s.iter().zip(v).map(|(a, b)| a + h * b).collect();
        let mapped = self.residual.projected_map(&shifted)?;
        for i in 0..y.len() {
            y[i] = v[i] - (mapped[i] - self.base[i]) / h;
        }
        Ok(())
    }
}

/// Matrix-free Newton-GMRES on the unconserved components.
pub fn solve_newton(
    stepper: &dyn MicroStepper,
    proj: &dyn ConservedProjector,
    f0: &[f64],
    guess: Option<&[f64]>,
    cfg: &CRConfig,
) -> Result<(Vec<f64>, LiftReport)> {
    let start = Instant::now();
    let len = f0.len();
    let mut pf0 = vec![0.0; len];
    project_blocks(proj, f0, &mut pf0);
    let residual = Residual {
        stepper,
        proj,
        f0,
        fixed: f0.iter().zip(&pf0).map(|(a, b)| a - b).collect(),
        cfg,
    };
    let mut s = vec![0.0; len];
    project_blocks(proj, guess.unwrap_or(f0), &mut s);

    let mut report = LiftReport::default();
    let mut base = residual.projected_map(&s)?;
    let mut g: Vec<f64> = s.iter().zip(&base).map(|(a, b)| a - b).collect();
    let mut gnorm = norm2(&g);
    report.residual = gnorm;
    debug!("newton 0: |g| = {gnorm:e}");

    let mut iter = 0;
    while !(gnorm < cfg.newton_tol) {
        if iter == cfg.max_newton_iters || !gnorm.is_finite() {
            report.seconds = start.elapsed().as_secs_f64();
            return Err(convergence_error("Newton-GMRES", &report));
        }
        iter += 1;
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut ds = vec![0.0; len];
        let outcome = {
            let op = JacobianOp {
                residual: &residual,
                s: &s,
                base: &base,
                fd_epsilon: cfg.fd_epsilon,
                s_inf: s.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            };
            gmres(&op, None, &rhs, &mut ds, &cfg.gmres)?
        };
        if !outcome.converged {
            // an inexact step is still useful unless GMRES made no headway
            if !(outcome.relative_residual < 0.9) {
                report.seconds = start.elapsed().as_secs_f64();
                return Err(Error::Convergence {
                    what: "GMRES (stagnated inside Newton)",
                    iterations: outcome.iterations,
                    residual: outcome.relative_residual,
                    history: report.residuals(),
                });
            }
            warn!(
                "GMRES stopped at relative residual {:e} after {} iterations",
                outcome.relative_residual, outcome.iterations
            );
        }
        for (a, d) in s.iter_mut().zip(&ds) {
            *a += d;
        }
        base = residual.projected_map(&s)?;
        g = s.iter().zip(&base).map(|(a, b)| a - b).collect();
        gnorm = norm2(&g);

        report.iterations = iter;
        report.residual = gnorm;
        report.gmres_iterations += outcome.iterations;
        let state = residual.state(&s);
        report.history.push(IterationRecord {
            iter,
            residual: gnorm,
            drift: conserved_drift(proj, &state, f0),
            seconds: start.elapsed().as_secs_f64(),
            gmres_iterations: outcome.iterations,
        });
        debug!(
            "newton {iter}: |g| = {gnorm:e}, gmres {}",
            outcome.iterations
        );
    }

    report.converged = true;
    report.seconds = start.elapsed().as_secs_f64();
    Ok((residual.state(&s), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::projection::MomentBasis;
    use crate::steppers::{D1Q3Stepper, IdentityStepper, LinearStepper};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Explicit Euler for r' = s, s' = (r - s)/eps.
    fn ode_stepper(eps: f64, dt: f64) -> LinearStepper {
        LinearStepper {
            matrix: Mat::from_row_major(2, 2, vec![1.0, dt, dt / eps, 1.0 - dt / eps]),
        }
    }

    #[test]
    fn stiff_ode_lands_near_slow_manifold() {
        let basis = MomentBasis::from_matrix(Mat::identity(2), 1).unwrap();
        let eps: f64 = 0.01;
        let a = (-1.0 + (1.0 + 4.0 * eps).sqrt()) / (2.0 * eps);
        let stepper = ode_stepper(eps, eps);
        let mut cfg = CRConfig::new(0).unwrap();
        cfg.picard_tol = 1e-14;
        let (x, report) = solve_picard(&stepper, &basis, &[1.0, 0.0], None, &cfg).unwrap();
        assert!(report.converged);
        assert_eq!(x[0], 1.0);
        assert!((x[1] - a).abs() < 10.0 * eps, "{} vs {a}", x[1]);
    }

    #[test]
    fn steady_state_needs_one_iteration() {
        let stepper = D1Q3Stepper::new(5, 1.0).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let f0 = vec![0.5; 15];
        let cfg = CRConfig::new(2).unwrap();
        let (f, report) = solve_picard(&stepper, &basis, &f0, None, &cfg).unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(report.residual, 0.0);
        assert_eq!(f, f0);
    }

    #[test]
    fn newton_on_affine_map_takes_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let stepper = D1Q3Stepper::new(10, 1.3).unwrap();
        let basis = MomentBasis::d1q3(1).unwrap();
        let f0: Vec<f64> = (0..30).map(|_| rng.gen_range(0.2..1.0)).collect();
        let mut compared = 0;
        for m in 0..3 {
            let mut cfg = CRConfig::new(m).unwrap();
            // initial residual g(P f0)
            let mapped = crate::cr::cr_map(&stepper, &basis, &f0, &f0, &cfg).unwrap();
            let g0: Vec<f64> = f0
                .chunks(3)
                .zip(mapped.chunks(3))
                .flat_map(|(a, b)| {
                    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    basis.project_complement(&d)
                })
                .collect();
            // one step reaches the GMRES tolerance up to the forward-difference error
            cfg.newton_tol = 1e-6 * norm2(&g0);
            let (fn_, report) = solve_newton(&stepper, &basis, &f0, None, &cfg).unwrap();
            assert_eq!(report.iterations, 1, "m={m}: {:?}", report.residuals());
            assert_eq!(fn_.len(), f0.len());
            cfg.newton_tol = 1e-12;
            cfg.picard_tol = 1e-13;
            let (tight, _) = solve_newton(&stepper, &basis, &f0, None, &cfg).unwrap();
            // higher orders can push the map's spectral radius past one, and
            // then only Newton finds the fixed point
            if let Ok((fp, _)) = solve_picard(&stepper, &basis, &f0, None, &cfg) {
                compared += 1;
                for (a, b) in tight.iter().zip(&fp) {
                    assert!((a - b).abs() < 1e-8);
                }
            }
        }
        assert!(compared >= 1);
    }

    #[test]
    fn identity_stepper_is_trivial() {
        let basis = MomentBasis::d1q3(1).unwrap();
        let stepper = IdentityStepper {
            block_len: 3,
            blocks: 4,
        };
        let f0: Vec<f64> = (0..12).map(|i| 1.0 + i as f64).collect();
        let cfg = CRConfig::new(0).unwrap();
        let (f, report) = solve_newton(&stepper, &basis, &f0, None, &cfg).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(f.len(), 12);
        for (a, b) in f.iter().zip(&f0) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn divergence_reports_history() {
        // s -> 2 s: CR with m = 0 amplifies the unconserved part
        let stepper = LinearStepper {
            matrix: Mat::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 2.0]),
        };
        let basis = MomentBasis::from_matrix(Mat::identity(2), 1).unwrap();
        let mut cfg = CRConfig::new(0).unwrap();
        cfg.max_picard_iters = 20;
        let err = solve_picard(&stepper, &basis, &[1.0, 1.0], None, &cfg).unwrap_err();
        let h = err.history().unwrap();
        assert_eq!(h.len(), 20);
        assert!(h[19] > h[0]);
    }
}
