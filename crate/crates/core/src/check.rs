//! Oracle suites run by the `check` subcommand.
//!
//! Each suite compares a fast code path with an independent construction and
//! reports the worst observed discrepancy against its tolerance.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bogoliubov::{dispersion, ModeParams};
use crate::dynamics::{propagate, propagate_ode_oracle, CondensateDrive};
use crate::fock::{density_matrix, hermitian_eigenvalues, pt_spectrum_oracle, schmidt_coefficients};
use crate::optics::{detector_couplings, make_beam_splitter};
use crate::projection::{brute_force_oracle, conditional_state, JointState, ProbeField};
use crate::witness::{negativity, pt_variance_oracle, su11_inequality};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<28} worst {:.3e} (tol {:.0e}, {} cases)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.cases
        )
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Normalized state with independent uniform amplitudes in the 3×3 block.
pub fn random_state(rng: &mut ChaCha8Rng) -> JointState {
    let c = Array2::from_shape_fn((3, 3), |_| random_complex(rng));
    JointState::from_amplitudes(c).expect("random amplitudes are nonzero")
}

/// |ψ_A⟩ ⊗ |ψ_B⟩ with each factor a random superposition of 0..=2 excitations.
pub fn random_product_state(rng: &mut ChaCha8Rng) -> JointState {
    let a: Vec<Complex64> = (0..3).map(|_| random_complex(rng)).collect();
    let b: Vec<Complex64> = (0..3).map(|_| random_complex(rng)).collect();
    JointState::from_amplitudes(Array2::from_shape_fn((3, 3), |(m, n)| a[m] * b[n]))
        .expect("product amplitudes are nonzero")
}

/// u² − v² = 1 and f² ω_B/μ = x over a logarithmic grid in x.
pub fn bogoliubov_identities() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for k in -60..=80 {
        let x = 10f64.powf(k as f64 / 10.0);
        let m = dispersion(ModeParams::new(x).expect("positive x"));
        worst = worst.max((m.bosonic_norm() - 1.0).abs());
        worst = worst.max((m.f * m.f * m.omega_b_over_mu - x).abs() / x);
        cases += 1;
    }
    CheckOutcome {
        name: "bogoliubov identities",
        worst,
        tolerance: 1e-12,
        cases,
    }
}

/// Relative symplectic defect along τ ∈ [0, 10] step 0.05.
pub fn symplectic(etas: &[f64]) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &eta in etas {
        let drive = CondensateDrive::real(eta, 1.0)?;
        for i in 0..=200 {
            let c = propagate(&drive, 0.05 * i as f64)?;
            worst = worst.max(c.relative_symplectic_defect());
            cases += 1;
        }
    }
    Ok(CheckOutcome {
        name: "symplectic propagator",
        worst,
        tolerance: 1e-8,
        cases,
    })
}

/// Matrix exponential against an RK4 integration of dP/dτ = iMP.
pub fn propagator_vs_rk4(etas: &[f64], taus: &[f64], step: f64) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &eta in etas {
        let drive = CondensateDrive::real(eta, 1.0)?;
        for &tau in taus {
            let fast = propagate(&drive, tau)?;
            let slow = propagate_ode_oracle(&drive, tau, step)?;
            worst = worst.max(fast.relative_distance(&slow));
            cases += 1;
        }
    }
    Ok(CheckOutcome {
        name: "propagator vs RK4",
        worst,
        tolerance: 1e-6,
        cases,
    })
}

/// Random beam splitters stay unitary and reciprocal.
pub fn beam_splitter_unitarity(draws: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let bs = make_beam_splitter(rng.gen_range(0.0..=1.0), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))?;
        worst = worst.max(detector_couplings(&bs).unitarity_defect());
        for d in bs.reciprocity_defects() {
            worst = worst.max(d);
        }
    }
    Ok(CheckOutcome {
        name: "beam-splitter unitarity",
        worst,
        tolerance: 1e-12,
        cases: draws,
    })
}

/// Closed-form heralded state against the full-space construction.
pub fn projection_oracle(draws: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let coeffs_a = propagate(&CondensateDrive::real(rng.gen_range(0.1..3.0), 1.0)?, rng.gen_range(0.1..3.0))?;
        let coeffs_b = propagate(&CondensateDrive::real(rng.gen_range(0.1..3.0), 1.0)?, rng.gen_range(0.1..3.0))?;
        let probe_a = ProbeField::new(Complex64::from_polar(rng.gen_range(0.05..0.5), rng.gen_range(-PI..PI)))?;
        let probe_b = ProbeField::new(Complex64::from_polar(rng.gen_range(0.05..0.5), rng.gen_range(-PI..PI)))?;
        let bs = make_beam_splitter(rng.gen_range(0.2..1.0), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))?;
        let fast = conditional_state(&coeffs_a, &coeffs_b, &probe_a, &probe_b, &bs, 2)?;
        let slow = brute_force_oracle(&coeffs_a, &coeffs_b, &probe_a, &probe_b, &bs, 10)?;
        worst = worst.max(fast.with_fixed_phase().distance_up_to_phase(&slow.with_fixed_phase()));
    }
    Ok(CheckOutcome {
        name: "projection oracle",
        worst,
        tolerance: 1e-6,
        cases: draws,
    })
}

/// Direct partial-transpose spectrum against the Schmidt formula.
pub fn pt_spectrum(draws: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let state = random_state(&mut rng);
        let direct = hermitian_eigenvalues(&density_matrix(&state)?.partial_transpose())?;
        let oracle = pt_spectrum_oracle(&schmidt_coefficients(&state));
        for (a, b) in direct.iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
        if direct.len() != oracle.len() {
            worst = f64::INFINITY;
        }
    }
    Ok(CheckOutcome {
        name: "partial-transpose spectrum",
        worst,
        tolerance: 1e-9,
        cases: draws,
    })
}

/// Closed-form transposed-state variances against explicit operators.
pub fn variance_oracle(draws: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let state = random_state(&mut rng);
        let ineq = su11_inequality(&state)?;
        let (v1, v2) = pt_variance_oracle(&state)?;
        worst = worst.max((ineq.var1 - v1).abs()).max((ineq.var2 - v2).abs());
    }
    Ok(CheckOutcome {
        name: "transposed variances",
        worst,
        tolerance: 1e-10,
        cases: draws,
    })
}

/// Product states never violate and have a non-negative PT spectrum.
/// `worst` is the largest violation margin rhs − lhs or −min_pt_eig seen.
pub fn separable_soundness(draws: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let state = random_product_state(&mut rng);
        let ineq = su11_inequality(&state)?;
        if ineq.violated {
            worst = worst.max(ineq.rhs - ineq.lhs);
        }
        worst = worst.max(-negativity(&state)?);
    }
    Ok(CheckOutcome {
        name: "separable soundness",
        worst,
        tolerance: 1e-10,
        cases: draws,
    })
}

/// Every suite with its default sizes.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    let taus: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    Ok(vec![
        bogoliubov_identities(),
        symplectic(&[0.0, 0.5, 7.7])?,
        propagator_vs_rk4(&[0.0, 0.5, 7.7], &taus, 1e-3)?,
        beam_splitter_unitarity(1000, 1)?,
        projection_oracle(20, 2)?,
        pt_spectrum(100, 3)?,
        variance_oracle(100, 4)?,
        separable_soundness(50, 5)?,
    ])
}
