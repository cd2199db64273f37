use crate::error::{Error, Result};
use crate::linalg::GmresConfig;

/// Largest supported extrapolation order.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Picard,
    Newton,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "picard" => Ok(SolverKind::Picard),
            "newton" | "newton-gmres" => Ok(SolverKind::Newton),
            other => Err(Error::argument(format!("unknown solver '{other}'"))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Picard => "picard",
            SolverKind::Newton => "newton",
        })
    }
}

/// `w_j = (-1)^(j+1) C(m+1, j)` for `j = 1..=m+1`: the extrapolation
/// `s(0) = sum_j w_j s(j dt)` that is exact for polynomials of degree `m`.
pub fn cr_weights(order: usize) -> Result<Vec<f64>> {
    if order > MAX_ORDER {
        return Err(Error::argument(format!(
            "extrapolation order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    let n = order + 1;
    let mut binom = 1.0f64;
    let mut w = Vec::with_capacity(n);
    for j in 1..=n {
        binom = binom * (n + 1 - j) as f64 / j as f64;
        w.push(if j % 2 == 1 { binom } else { -binom });
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CRConfig {
    order: usize,
    weights: Vec<f64>,
    pub solver: SolverKind,
    /// Picard stops once the 2-norm of the unconserved update drops below this.
    pub picard_tol: f64,
    pub max_picard_iters: usize,
    /// Absolute 2-norm target for `g(s)`, in stored units.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Relative finite-difference step; the actual step along `v` is
    /// `fd_epsilon (1 + |s|_inf) / |v|_2`.
    pub fd_epsilon: f64,
    pub gmres: GmresConfig,
}

impl CRConfig {
    pub fn new(order: usize) -> Result<Self> {
        Ok(CRConfig {
            order,
            weights: cr_weights(order)?,
            solver: SolverKind::Picard,
            picard_tol: 1e-10,
            max_picard_iters: 1000,
            newton_tol: 1e-10,
            max_newton_iters: 30,
            fd_epsilon: f64::EPSILON.sqrt(),
            gmres: GmresConfig::default(),
        })
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn set_order(&mut self, order: usize) -> Result<()> {
        self.weights = cr_weights(order)?;
        self.order = order;
        Ok(())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}
