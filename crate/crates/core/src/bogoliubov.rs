//! Bogoliubov mode functions and the quasiparticle dispersion.
//!
//! Everything is expressed through the single dimensionless ratio
//! x = ħω_q/μ = (qξ)², the free-particle kinetic energy over the chemical
//! potential.

use crate::{Error, Result};

/// Dimensionless kinetic-to-chemical-potential ratio x = ħω_q/μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    x: f64,
}

impl ModeParams {
    pub fn new(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Domain(format!(
                "kinetic ratio x must be finite and positive, got {x}"
            )));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// Bogoliubov amplitudes (u_q, v_q), f_q = u_q − v_q and ħω_q^B/μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode {
    pub u: f64,
    pub v: f64,
    pub f: f64,
    pub omega_b_over_mu: f64,
}

impl BogoliubovMode {
    /// u² − v², which is 1 for a valid mode.
    pub fn bosonic_norm(&self) -> f64 {
        (self.u - self.v) * (self.u + self.v)
    }
}

/// Quasiparticle energy and mode functions for the ratio `params.x()`.
pub fn dispersion(params: ModeParams) -> BogoliubovMode {
    let x = params.x;
    // sqrt((x+1)² − 1) without cancellation at small x
    let omega = (x * (x + 2.0)).sqrt();
    // ((x+1)/ω − 1)/2 rewritten as 1/(2ω(x+1+ω)); stable at large x
    let v_sq = 1.0 / (2.0 * omega * (x + 1.0 + omega));
    let v = v_sq.sqrt();
    let u = (v_sq + 1.0).sqrt();
    // u − v = 1/(u + v) since u² − v² = 1
    let f = 1.0 / (u + v);
    BogoliubovMode {
        u,
        v,
        f,
        omega_b_over_mu: omega,
    }
}

/// Collective coupling η = √N f_q Ω.
pub fn eta_from_physical(n_atoms: u64, rabi: f64, mode: &BogoliubovMode) -> Result<f64> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter {
            name: "n_atoms",
            reason: "must be at least 1".into(),
        });
    }
    Ok((n_atoms as f64).sqrt() * mode.f * rabi)
}
