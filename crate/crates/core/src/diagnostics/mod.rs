//! Spectra of the projectors and of the CR map Jacobian, and GMRES
//! iteration counts as a function of grid size.

mod jacobian;
mod spectrum;
mod sweep;

pub use jacobian::{cr_jacobian, cr_jacobian_radius, cr_jacobian_spectrum, FULL_SPECTRUM_CAP};
pub use spectrum::{
    projector_spectrum, ProjectorKind, SpectrumParams, SpectrumReport, PROJECTOR_CAP,
};
pub use sweep::{gmres_iteration_sweep, SweepCase, SweepRow};
