//! Entanglement of two remote Bose-Einstein condensates heralded by the
//! coincident detection of two Bragg-scattered probe photons.
//!
//! The pipeline for one parameter point is
//!
//! 1. [`dynamics::propagate`] evolves each condensate's probe operator under
//!    the effective three-mode Bragg Hamiltonian, giving [`dynamics::ScatterCoeffs`];
//! 2. [`projection::conditional_state`] combines both condensates, the probe
//!    coherent amplitudes and the beam splitter into the post-coincidence
//!    [`projection::JointState`];
//! 3. [`witness`] evaluates the partial-transpose spectrum, the SU(1,1)
//!    transposed-variance inequality and the quadrature parameter ξ_XP.
//!
//! All energies are in units of the quasiparticle energy ω_q^B and time is
//! the dimensionless τ = ω_q^B t.

pub mod bogoliubov;
pub mod check;
pub mod config;
pub mod dynamics;
mod error;
pub mod fock;
pub mod optics;
pub mod projection;
pub mod sweep;
pub mod witness;

pub use num_complex::Complex64;

pub use error::{Error, Result};
