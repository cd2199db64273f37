use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, Complex, Mat};
use crate::projection::{naive_projector, ConservedProjector, MomentBasis};

/// Largest population count for which projector spectra are computed.
pub const PROJECTOR_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorKind {
    /// `I - M^{-1} M^0` with an explicit inverse.
    Naive,
    /// `I - Q Q^T`.
    Qr,
}

impl std::str::FromStr for ProjectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" | "inverse" => Ok(ProjectorKind::Naive),
            "qr" => Ok(ProjectorKind::Qr),
            other => Err(Error::argument(format!(
                "unknown projector '{other}' (naive|qr)"
            ))),
        }
    }
}

impl std::fmt::Display for ProjectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProjectorKind::Naive => "naive",
            ProjectorKind::Qr => "qr",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumParams {
    pub n_cells: usize,
    pub n_velocities: usize,
    pub k_conserved: usize,
    pub order: Option<usize>,
    pub scenario: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex>,
    pub spectral_radius: f64,
    pub operator: String,
    pub params: SpectrumParams,
}

impl SpectrumReport {
    pub fn from_eigenvalues(
        eigenvalues: Vec<Complex>,
        operator: impl Into<String>,
        params: SpectrumParams,
    ) -> Self {
        let spectral_radius = eigenvalues.iter().map(Complex::abs).fold(0.0, f64::max);
        SpectrumReport {
            eigenvalues,
            spectral_radius,
            operator: operator.into(),
            params,
        }
    }

    /// Largest distance of an eigenvalue from the nearer of 0 and 1.
    pub fn max_distance_from_binary(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.abs().min(Complex::new(l.re - 1.0, l.im).abs()))
            .fold(0.0, f64::max)
    }

    pub fn count_near(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| Complex::new(l.re - value, l.im).abs() <= tol)
            .count()
    }
}

/// Eigenvalues of the dense `q x q` projector.
pub fn projector_spectrum(basis: &MomentBasis, which: ProjectorKind) -> Result<SpectrumReport> {
    let q = basis.len();
    if q > PROJECTOR_CAP {
        return Err(Error::DimensionCap {
            dim: q,
            cap: PROJECTOR_CAP,
        });
    }
    let p: Mat = match which {
        ProjectorKind::Qr => basis.materialize(),
        ProjectorKind::Naive => naive_projector(basis)?.matrix().clone(),
    };
    let params = SpectrumParams {
        n_cells: 1,
        n_velocities: q,
        k_conserved: basis.k_conserved(),
        order: None,
        scenario: format!("{:?}", basis.kind()).to_lowercase(),
    };
    Ok(SpectrumReport::from_eigenvalues(
        eigenvalues(&p)?,
        format!("projector-{which}"),
        params,
    ))
}
