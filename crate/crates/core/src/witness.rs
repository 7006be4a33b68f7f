//! Entanglement diagnostics for the heralded two-condensate state.
//!
//! The higher-moment test starts from the uncertainty relation of the SU(1,1)
//! pairing operators K_x = (A†B† + AB)/2, K_y = (A†B† − AB)/2i and
//! K_z = (A†A + B†B + 1)/2, evaluated in the partially transposed state.
//! In terms of moments of the original state the two variances become
//!
//! ```text
//! var1 = N₂ + N + M
//! var2 = N₂ + N − M − 4|⟨A†B⟩|²
//! N₂ = 2⟨A†A B†B⟩,  N = ⟨A†A⟩ + ⟨B†B⟩ + 1
//! M  = ⟨A†²B²⟩ + ⟨A²B†²⟩ − ⟨A†B + AB†⟩²
//! ```
//!
//! and separable states satisfy var1·var2 ≥ N².
//!
//! These are variances of the *untransposed* pairing operators under the
//! *transposed* state. Taking the variance of A†B + AB† under the original
//! state instead misses an ordering constant of 1; `pt_variance_oracle`
//! evaluates the transposed-state form with explicit matrices.

use ndarray::Array2;
use num_complex::Complex64;

use crate::fock::{density_matrix, expectation, hermitian_eigenvalues};
use crate::projection::JointState;
use crate::{Error, Result};

/// lhs < rhs − VIOLATION_TOL counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-12;

/// |N₂| below this switches on the reduced (N₂ = 0) form.
pub const N2_ZERO_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Moments {
    pub n2: f64,
    pub n_tot: f64,
    pub m_term: f64,
    pub cross: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Inequality {
    pub moments: Su11Moments,
    pub var1: f64,
    pub var2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    /// −M² − 4(N + M)|⟨A†B⟩|², reported when N₂ = 0; negative iff violated.
    pub reduced_form: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    pub n2: f64,
    pub n_tot: f64,
    pub m_term: f64,
    pub cross: Complex64,
    pub var1: f64,
    pub var2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    pub reduced_form: Option<f64>,
    pub min_pt_eig: f64,
    pub xi_xp: f64,
}

impl WitnessReport {
    pub fn lhs_minus_rhs(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub fn su11_moments(state: &JointState) -> Result<Su11Moments> {
    let n2 = 2.0 * expectation(state, (1, 1, 1, 1))?.re;
    let n_a = expectation(state, (1, 1, 0, 0))?.re;
    let n_b = expectation(state, (0, 0, 1, 1))?.re;
    let cross = expectation(state, (1, 0, 0, 1))?;
    let pair = expectation(state, (2, 0, 0, 2))?;
    let hop = 2.0 * cross.re;
    Ok(Su11Moments {
        n2,
        n_tot: n_a + n_b + 1.0,
        m_term: 2.0 * pair.re - hop * hop,
        cross,
    })
}

pub fn su11_inequality(state: &JointState) -> Result<Su11Inequality> {
    let moments = su11_moments(state)?;
    let Su11Moments {
        n2,
        n_tot,
        m_term,
        cross,
    } = moments;
    let c2 = cross.norm_sqr();
    let var1 = n2 + n_tot + m_term;
    let var2 = n2 + n_tot - m_term - 4.0 * c2;
    let lhs = var1 * var2;
    let rhs = n_tot * n_tot;
    let reduced_form = (n2.abs() <= N2_ZERO_TOL).then(|| -m_term * m_term - 4.0 * (n_tot + m_term) * c2);
    Ok(Su11Inequality {
        moments,
        var1,
        var2,
        lhs,
        rhs,
        violated: lhs < rhs - VIOLATION_TOL,
        reduced_form,
    })
}

/// Most negative eigenvalue of the partially transposed density matrix.
pub fn negativity(state: &JointState) -> Result<f64> {
    let rho = density_matrix(state)?;
    let ev = hermitian_eigenvalues(&rho.partial_transpose())?;
    Ok(ev[0])
}

/// ξ_XP = ½[Var(X_A + X_B) + Var(P_A − P_B)], X = (S + S†)/√2, P = (S − S†)/(√2 i).
pub fn duan_simon_xi(state: &JointState) -> Result<f64> {
    let m = |p| expectation(state, p);
    let n_a = m((1, 1, 0, 0))?.re;
    let n_b = m((0, 0, 1, 1))?.re;
    let hop = m((1, 0, 0, 1))?.re;
    let a1 = m((0, 1, 0, 0))?;
    let b1 = m((0, 0, 0, 1))?;
    let a2 = m((0, 2, 0, 0))?;
    let b2 = m((0, 0, 0, 2))?;
    let ab = m((0, 1, 0, 1))?;

    // S = A + B, D = A − B; [S, S†] = [D, D†] = 2
    let s_mean = a1 + b1;
    let d_mean = a1 - b1;
    let var_x = n_a + n_b + 2.0 * hop + 1.0 + (a2 + b2 + 2.0 * ab).re - 2.0 * s_mean.re.powi(2);
    let var_p = n_a + n_b - 2.0 * hop + 1.0 - (a2 + b2 - 2.0 * ab).re - 2.0 * d_mean.im.powi(2);
    Ok(0.5 * (var_x + var_p))
}

/// (var1, var2) as Tr(ρ^{T_B} O²) − Tr(ρ^{T_B} O)² for O₁ = A†B† + AB and
/// O₂ = (A†B† − AB)/i, with the operators built on a space padded by two
/// levels per mode.
pub fn pt_variance_oracle(state: &JointState) -> Result<(f64, f64)> {
    pt_variance_with_headroom(state, 2)
}

pub fn pt_variance_with_headroom(state: &JointState, headroom: usize) -> Result<(f64, f64)> {
    if headroom < 1 {
        return Err(Error::Truncation(
            "pair creation needs at least one level of headroom per mode".into(),
        ));
    }
    let d = state.local_dim();
    let l = d + headroom;
    let rho_t = density_matrix(state)?.partial_transpose();
    let dim = l * l;
    let mut embedded = Array2::zeros((dim, dim));
    for ((row, col), &x) in rho_t.indexed_iter() {
        let (i, j) = (row / d, row % d);
        let (m, n) = (col / d, col % d);
        embedded[[i * l + j, m * l + n]] = x;
    }

    let a = kron(&annihilator(l), &eye(l));
    let b = kron(&eye(l), &annihilator(l));
    let create_pair = dagger(&a).dot(&dagger(&b));
    let kill_pair = a.dot(&b);
    let o1 = &create_pair + &kill_pair;
    let o2 = (&create_pair - &kill_pair).mapv(|x| x * Complex64::new(0.0, -1.0));

    let variance = |o: &Array2<Complex64>| {
        let mean = trace_product(&embedded, o);
        let second = trace_product(&embedded, &o.dot(o));
        (second - mean * mean).re
    };
    Ok((variance(&o1), variance(&o2)))
}

/// Full diagnostic bundle for one state.
pub fn evaluate(state: &JointState) -> Result<WitnessReport> {
    let ineq = su11_inequality(state)?;
    Ok(WitnessReport {
        n2: ineq.moments.n2,
        n_tot: ineq.moments.n_tot,
        m_term: ineq.moments.m_term,
        cross: ineq.moments.cross,
        var1: ineq.var1,
        var2: ineq.var2,
        lhs: ineq.lhs,
        rhs: ineq.rhs,
        violated: ineq.violated,
        reduced_form: ineq.reduced_form,
        min_pt_eig: negativity(state)?,
        xi_xp: duan_simon_xi(state)?,
    })
}

fn annihilator(l: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((l, l), |(i, j)| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

fn eye(l: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((l, l), |(i, j)| if i == j { Complex64::new(1.0, 0.0) } else { ZERO })
}

fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|x| x.conj())
}

fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Tr(X Y)
fn trace_product(x: &Array2<Complex64>, y: &Array2<Complex64>) -> Complex64 {
    let n = x.nrows();
    let mut t = ZERO;
    for i in 0..n {
        for k in 0..n {
            t += x[[i, k]] * y[[k, i]];
        }
    }
    t
}
