pub mod cli;
pub mod cr;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod kinetic;
pub mod linalg;
pub mod projection;
pub mod scenario;
pub mod steppers;

pub use error::{Error, Result};
