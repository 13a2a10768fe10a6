//! Pseudo-spectral simulation of viscoelastic flows with Kelvin-Voigt
//! damping on periodic domains, with the diagnostics and exact reference
//! solutions used to verify it.

pub mod diagnostics;
pub mod diffusion_dispersion;
pub mod error;
pub mod initial_data;
pub mod manufactured;
pub mod oracles;
pub mod matrix;
pub mod polynomial;
pub mod solver;
pub mod spectral;
pub mod stored_energy;

pub use error::{Error, Result};
