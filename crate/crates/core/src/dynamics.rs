//! Heisenberg-picture dynamics of one condensate's Bragg triad.
//!
//! The operators X = (α_q, α_{−q}†, c†) obey dX/dτ = i M X with
//!
//! ```text
//!     ⎡ −1    0    −η̃ ⎤
//! M = ⎢  0    1     η̃ ⎥
//!     ⎣ η̃*   η̃*   −δ̃ ⎦
//! ```
//!
//! so X(τ) = P(τ) X(0) with P(τ) = exp(iτM). The evolved probe annihilator
//! is read off the conjugated third row of P:
//! c(τ) = P₃₁* α_q† + P₃₂* α_{−q} + P₃₃* c(0).
//!
//! `propagate` uses scaling and squaring, which stays accurate near the
//! exceptional points where M is defective. `propagate_eigen` transcribes
//! the D E D⁻¹ diagonal form and `propagate_ode_oracle` integrates the
//! equations of motion with RK4; both exist to cross-check the primary path.

use num_complex::Complex64;

use crate::{Error, Result};

pub type Matrix3 = [[Complex64; 3]; 3];

/// Largest admissible max|Im λ|·τ before the propagator is declared overflowed.
pub const GROWTH_LIMIT: f64 = 600.0;

/// Condition estimate above which the eigen path refuses to run.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Drive parameters for one condensate, in units of ω_q^B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateDrive {
    pub eta: Complex64,
    pub delta: f64,
}

impl CondensateDrive {
    pub fn new(eta: Complex64, delta: f64) -> Result<Self> {
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "must be finite".into(),
            });
        }
        if eta.norm() >= 1e3 {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("|eta| = {} exceeds the sanity bound 1e3", eta.norm()),
            });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must be finite".into(),
            });
        }
        Ok(Self { eta, delta })
    }

    /// Real coupling, the common case.
    pub fn real(eta: f64, delta: f64) -> Result<Self> {
        Self::new(Complex64::new(eta, 0.0), delta)
    }
}

/// Coefficients of c(τ) = a_q α_q† + a_{−q} α_{−q} + a_c c(0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub a_q: Complex64,
    pub a_minus_q: Complex64,
    pub a_c: Complex64,
    pub tau: f64,
}

impl ScatterCoeffs {
    pub fn identity() -> Self {
        Self {
            a_q: ZERO,
            a_minus_q: ZERO,
            a_c: ONE,
            tau: 0.0,
        }
    }

    /// Reads the conjugated third row of a triad propagator.
    pub fn from_propagator(p: &Matrix3, tau: f64) -> Self {
        Self {
            a_q: p[2][0].conj(),
            a_minus_q: p[2][1].conj(),
            a_c: p[2][2].conj(),
            tau,
        }
    }

    /// [c(τ), c(τ)†] = |a_c|² + |a_{−q}|² − |a_q|².
    pub fn commutator(&self) -> f64 {
        self.a_c.norm_sqr() + self.a_minus_q.norm_sqr() - self.a_q.norm_sqr()
    }

    /// Commutator defect relative to the magnitude of the cancelling terms.
    pub fn relative_symplectic_defect(&self) -> f64 {
        let scale = self.a_c.norm_sqr() + self.a_minus_q.norm_sqr() + self.a_q.norm_sqr();
        (self.commutator() - 1.0).abs() / scale.max(1.0)
    }

    /// Euclidean distance to `other` over the coefficient triple, relative to `other`.
    pub fn relative_distance(&self, other: &ScatterCoeffs) -> f64 {
        let diff = (self.a_q - other.a_q).norm_sqr()
            + (self.a_minus_q - other.a_minus_q).norm_sqr()
            + (self.a_c - other.a_c).norm_sqr();
        let norm = other.a_q.norm_sqr() + other.a_minus_q.norm_sqr() + other.a_c.norm_sqr();
        (diff / norm).sqrt()
    }
}

/// Eigen-structure of M used by the diagonal-form cross-check.
#[derive(Debug, Clone)]
pub struct PropagatorDecomposition {
    pub m_matrix: Matrix3,
    pub eigenvalues: [Complex64; 3],
    /// Columns are the right eigenvectors (unit norm).
    pub eigenvectors: Matrix3,
    /// ‖D‖_F ‖D⁻¹‖_F; infinite when no eigenbasis could be formed.
    pub condition_estimate: f64,
}

pub fn build_m_matrix(drive: &CondensateDrive) -> Matrix3 {
    let e = drive.eta;
    let ec = e.conj();
    let d = Complex64::new(drive.delta, 0.0);
    [[-ONE, ZERO, -e], [ZERO, ONE, e], [ec, ec, -d]]
}

/// P(τ) = exp(iτM).
pub fn propagator(drive: &CondensateDrive, tau: f64) -> Result<Matrix3> {
    check_tau(tau)?;
    let m = build_m_matrix(drive);
    guard_growth(&m, tau)?;
    let p = expm(&scale(&m, I * tau));
    if !is_finite(&p) {
        return Err(Error::NumericOverflow {
            exponent: growth_exponent(&m, tau),
            limit: GROWTH_LIMIT,
        });
    }
    Ok(p)
}

pub fn propagate(drive: &CondensateDrive, tau: f64) -> Result<ScatterCoeffs> {
    Ok(ScatterCoeffs::from_propagator(&propagator(drive, tau)?, tau))
}

pub fn decompose(drive: &CondensateDrive) -> PropagatorDecomposition {
    let m = build_m_matrix(drive);
    let eigenvalues = eigenvalues3(&m);
    let mut d = [[ZERO; 3]; 3];
    let mut condition = f64::INFINITY;
    let mut complete = true;
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        match null_vector(&m, lambda) {
            Some(v) => {
                for (row, vi) in d.iter_mut().zip(v) {
                    row[k] = vi;
                }
            }
            None => complete = false,
        }
    }
    if complete {
        if let Some(inv) = inverse(&d) {
            condition = frobenius(&d) * frobenius(&inv);
        }
    }
    PropagatorDecomposition {
        m_matrix: m,
        eigenvalues,
        eigenvectors: d,
        condition_estimate: condition,
    }
}

/// The D E(τ) D⁻¹ route. Fails when M is too close to defective.
pub fn propagate_eigen(drive: &CondensateDrive, tau: f64) -> Result<ScatterCoeffs> {
    check_tau(tau)?;
    let dec = decompose(drive);
    if !(dec.condition_estimate <= EIGEN_CONDITION_LIMIT) {
        return Err(Error::IllConditioned {
            condition: dec.condition_estimate,
        });
    }
    guard_growth(&dec.m_matrix, tau)?;
    let d = dec.eigenvectors;
    let d_inv = inverse(&d).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let mut de = d;
    for row in de.iter_mut() {
        for (k, x) in row.iter_mut().enumerate() {
            *x *= (I * dec.eigenvalues[k] * tau).exp();
        }
    }
    Ok(ScatterCoeffs::from_propagator(&matmul(&de, &d_inv), tau))
}

/// Classical RK4 integration of dP/dτ = iMP from P(0) = 1.
///
/// The step is shrunk so an integer number of steps lands exactly on `tau`.
pub fn propagate_ode_oracle(drive: &CondensateDrive, tau: f64, step: f64) -> Result<ScatterCoeffs> {
    check_tau(tau)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("must be positive, got {step}"),
        });
    }
    if tau > 0.0 && step > tau / 10.0 {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("{step} exceeds tau/10 = {}", tau / 10.0),
        });
    }
    if tau == 0.0 {
        return Ok(ScatterCoeffs::identity());
    }
    let generator = scale(&build_m_matrix(drive), I);
    let n = (tau / step).ceil() as usize;
    let h = tau / n as f64;
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(h / 2.0, 0.0);
    let mut p = identity();
    for _ in 0..n {
        let k1 = matmul(&generator, &p);
        let k2 = matmul(&generator, &axpy(&p, half, &k1));
        let k3 = matmul(&generator, &axpy(&p, half, &k2));
        let k4 = matmul(&generator, &axpy(&p, hc, &k3));
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] += hc / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    Ok(ScatterCoeffs::from_propagator(&p, tau))
}

/// max_i |Im λ_i| · τ for the eigenvalues of `m`.
pub fn growth_exponent(m: &Matrix3, tau: f64) -> f64 {
    eigenvalues3(m)
        .iter()
        .map(|l| l.im.abs())
        .fold(0.0, f64::max)
        * tau
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be finite and non-negative, got {tau}")));
    }
    Ok(())
}

fn guard_growth(m: &Matrix3, tau: f64) -> Result<()> {
    let exponent = growth_exponent(m, tau);
    if exponent > GROWTH_LIMIT {
        return Err(Error::NumericOverflow {
            exponent,
            limit: GROWTH_LIMIT,
        });
    }
    Ok(())
}

// ---- 3×3 complex helpers ----

pub fn identity() -> Matrix3 {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut c = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

fn scale(a: &Matrix3, s: Complex64) -> Matrix3 {
    a.map(|row| row.map(|x| x * s))
}

/// a + s·b
fn axpy(a: &Matrix3, s: Complex64, b: &Matrix3) -> Matrix3 {
    let mut c = *a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += s * b[i][j];
        }
    }
    c
}

fn norm1(a: &Matrix3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn frobenius(a: &Matrix3) -> f64 {
    a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn is_finite(a: &Matrix3) -> bool {
    a.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// Scaling and squaring with a degree-18 Taylor polynomial on ‖A/2^s‖₁ ≤ 1/2.
pub fn expm(a: &Matrix3) -> Matrix3 {
    let norm = norm1(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = scale(a, Complex64::new(0.5f64.powi(s), 0.0));
    let mut result = identity();
    let mut term = identity();
    for k in 1..=18 {
        term = scale(&matmul(&term, &scaled), Complex64::new(1.0 / k as f64, 0.0));
        result = axpy(&result, ONE, &term);
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

fn det(a: &Matrix3) -> Complex64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn inverse(a: &Matrix3) -> Option<Matrix3> {
    let d = det(a);
    if d.norm() <= f64::MIN_POSITIVE || !d.is_finite() {
        return None;
    }
    let mut inv = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
        }
    }
    Some(inv)
}

/// det(M − λI).
pub fn characteristic(m: &Matrix3, lambda: Complex64) -> Complex64 {
    let mut s = *m;
    for (i, row) in s.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    det(&s)
}

/// Roots of det(M − λI) by Durand–Kerner iteration with a Newton polish.
pub fn eigenvalues3(m: &Matrix3) -> [Complex64; 3] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let d = det(m);
    // monic: λ³ + c2 λ² + c1 λ + c0
    let (c2, c1, c0) = (-tr, minors, -d);
    let poly = |z: Complex64| ((z + c2) * z + c1) * z + c0;
    let dpoly = |z: Complex64| (3.0 * z + 2.0 * c2) * z + c1;
    let radius = 1.0 + c2.norm().max(c1.norm()).max(c0.norm());
    let seed = Complex64::new(0.4, 0.9);
    let mut roots = [seed * radius, seed * seed * radius, seed * seed * seed * radius];
    for _ in 0..1000 {
        let mut change: f64 = 0.0;
        for i in 0..3 {
            let mut denom = ONE;
            for j in 0..3 {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let delta = poly(roots[i]) / denom;
            roots[i] -= delta;
            change = change.max(delta.norm());
        }
        if change <= 1e-15 * radius {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let dp = dpoly(*r);
            if dp.norm() < 1e-12 * radius * radius {
                break;
            }
            let step = poly(*r) / dp;
            if !step.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Unit vector v with (M − λI) v ≈ 0, from the best-conditioned row cross product.
fn null_vector(m: &Matrix3, lambda: Complex64) -> Option<[Complex64; 3]> {
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let cross = |x: &[Complex64; 3], y: &[Complex64; 3]| {
        [
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ]
    };
    let scale = frobenius(&a).max(1.0);
    let best = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| cross(&a[i], &a[j]))
        .max_by(|u, v| vnorm(u).total_cmp(&vnorm(v)))?;
    let n = vnorm(&best);
    if n <= 1e-10 * scale * scale {
        return None;
    }
    Some(best.map(|x| x / n))
}

fn vnorm(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
