//! Conditional joint state of the two condensates after a two-photon coincidence.
//!
//! With C_{D2} C_{D1} = u c_a² + v c_b² + w c_a c_b and each c_j(τ) acting on
//! the quasiparticle vacuum and a coherent probe, the heralded state is
//!
//! ```text
//! |Φ⟩ ∝ u |S_A, 0_B⟩ + v |0_A, S_B⟩ + w |Σ_A, Σ_B⟩
//! S_A = √2 a_q² |2⟩ + 2 a_q a_c α |1⟩ + a_c² α² |0⟩
//! Σ_A = a_q |1⟩ + a_c α |0⟩
//! ```
//!
//! and likewise for B. Only amplitudes with m + n ≤ 2 are populated.

use ndarray::Array2;
use num_complex::Complex64;

use crate::dynamics::ScatterCoeffs;
use crate::optics::{BeamSplitter, CrossTermConvention, PairAmplitudes};
use crate::{Error, Result};

/// Weights below this are treated as a vanishing coincidence probability.
pub const MIN_COINCIDENCE_WEIGHT: f64 = 1e-30;

/// A heralded amplitude vector shorter than this fraction of the summed
/// magnitudes of its terms is cancellation noise.
pub const CANCELLATION_TOL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coherent probe amplitude; the mean photon number is |amplitude|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeField {
    amplitude: Complex64,
}

impl ProbeField {
    pub fn new(amplitude: Complex64) -> Result<Self> {
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "probe amplitude",
                reason: "must be finite".into(),
            });
        }
        if amplitude.norm_sqr() > 1e6 {
            return Err(Error::InvalidParameter {
                name: "probe amplitude",
                reason: format!("|amplitude|² = {} exceeds 1e6", amplitude.norm_sqr()),
            });
        }
        Ok(Self { amplitude })
    }

    /// √n_p · e^{iθ}.
    pub fn from_photon_number(n_p: f64, theta: f64) -> Result<Self> {
        if !(n_p.is_finite() && n_p >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "n_p",
                reason: format!("must be finite and non-negative, got {n_p}"),
            });
        }
        Self::new(Complex64::from_polar(n_p.sqrt(), theta))
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn mean_photons(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// Normalized amplitudes C[m][n] of |m⟩_A ⊗ |n⟩_B.
///
/// The unnormalized amplitudes were divided by `scale` (their largest
/// magnitude) before the norm was taken, so the physical squared norm is
/// `scale² · scaled_weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: Array2<Complex64>,
    scaled_weight: f64,
    scale: f64,
}

impl JointState {
    /// Normalizes an arbitrary square amplitude matrix of side n_max + 1 ≥ 3.
    pub fn from_amplitudes(raw: Array2<Complex64>) -> Result<Self> {
        let state = Self::normalize(raw)?;
        let weight = state.coincidence_weight();
        if weight < MIN_COINCIDENCE_WEIGHT {
            return Err(Error::ZeroCoincidence { weight });
        }
        Ok(state)
    }

    fn normalize(raw: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = raw.dim();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if rows < 3 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                reason: format!("must be at least 2, got {}", rows as i64 - 1),
            });
        }
        if raw.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite amplitude".into()));
        }
        let scale = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::ZeroCoincidence { weight: 0.0 });
        }
        let scaled = raw.mapv(|c| c / scale);
        let scaled_weight: f64 = scaled.iter().map(|c| c.norm_sqr()).sum();
        let norm = scaled_weight.sqrt();
        Ok(Self {
            amplitudes: scaled.mapv(|c| c / norm),
            scaled_weight,
            scale,
        })
    }

    /// Builds a state from (m, n, amplitude) triples on an n_max truncation.
    pub fn from_entries(n_max: usize, entries: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut c = Array2::zeros((n_max + 1, n_max + 1));
        for &(m, n, a) in entries {
            if m > n_max || n > n_max {
                return Err(Error::DimensionMismatch {
                    expected: n_max + 1,
                    found: m.max(n) + 1,
                });
            }
            c[[m, n]] += a;
        }
        Self::from_amplitudes(c)
    }

    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, m: usize, n: usize) -> Complex64 {
        self.amplitudes.get((m, n)).copied().unwrap_or(ZERO)
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.nrows() - 1
    }

    /// n_max + 1
    pub fn local_dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled_weight(&self) -> f64 {
        self.scaled_weight
    }

    /// Squared norm before normalization, proportional to the coincidence rate.
    pub fn coincidence_weight(&self) -> f64 {
        self.scale * self.scale * self.scaled_weight
    }

    /// Natural log of the coincidence weight; finite even when the weight overflows.
    pub fn ln_coincidence_weight(&self) -> f64 {
        2.0 * self.scale.ln() + self.scaled_weight.ln()
    }

    /// Same state with the largest amplitude rotated onto the positive real axis.
    ///
    /// Ties (within 1e-9 relative) go to the first entry in row-major order.
    pub fn with_fixed_phase(&self) -> JointState {
        let max = self.amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let pivot = self
            .amplitudes
            .iter()
            .find(|c| c.norm() >= max * (1.0 - 1e-9))
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        JointState {
            amplitudes: self.amplitudes.mapv(|c| c * phase),
            ..self.clone()
        }
    }

    /// Largest entrywise difference after aligning the global phase of `self`
    /// to `other` through their overlap. Both states must share a truncation.
    pub fn distance_up_to_phase(&self, other: &JointState) -> f64 {
        if self.amplitudes.dim() != other.amplitudes.dim() {
            return f64::INFINITY;
        }
        let overlap: Complex64 = self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn coincidence_weight(state: &JointState) -> f64 {
    state.coincidence_weight()
}

/// Heralded state for a beam splitter, using the directly expanded cross term.
pub fn conditional_state(
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
    probe_a: &ProbeField,
    probe_b: &ProbeField,
    bs: &BeamSplitter,
    n_max: usize,
) -> Result<JointState> {
    let pairs = PairAmplitudes::from_beam_splitter(bs, CrossTermConvention::DirectExpansion);
    conditional_state_from_pairs(coeffs_a, coeffs_b, probe_a, probe_b, &pairs, n_max)
}

pub fn conditional_state_from_pairs(
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
    probe_a: &ProbeField,
    probe_b: &ProbeField,
    pairs: &PairAmplitudes,
    n_max: usize,
) -> Result<JointState> {
    if n_max < 2 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: format!("must be at least 2, got {n_max}"),
        });
    }
    let (aq, ac, alpha) = (coeffs_a.a_q, coeffs_a.a_c, probe_a.amplitude());
    let (bq, bc, beta) = (coeffs_b.a_q, coeffs_b.a_c, probe_b.amplitude());
    let PairAmplitudes { u, v, w } = *pairs;
    let sqrt2 = std::f64::consts::SQRT_2;

    // Ratios keep every product bounded by the largest scattering factor.
    let s = aq.norm().max(bq.norm()).max(ac.norm()).max(bc.norm());
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain("scattering coefficients are zero or non-finite".into()));
    }
    let (aq, ac, bq, bc) = (aq / s, ac / s, bq / s, bc / s);

    let mut c = Array2::zeros((n_max + 1, n_max + 1));
    c[[2, 0]] = u * sqrt2 * aq * aq;
    c[[0, 2]] = v * sqrt2 * bq * bq;
    c[[1, 0]] = u * 2.0 * aq * ac * alpha + w * aq * bc * beta;
    c[[0, 1]] = v * 2.0 * bq * bc * beta + w * ac * alpha * bq;
    c[[1, 1]] = w * aq * bq;
    c[[0, 0]] = u * ac * ac * alpha * alpha + v * bc * bc * beta * beta + w * ac * alpha * bc * beta;

    // Entries that cancel to rounding level count as exact zeros.
    let bound = [
        (u * aq * aq).norm() * sqrt2,
        (v * bq * bq).norm() * sqrt2,
        2.0 * (u * aq * ac * alpha).norm() + (w * aq * bc * beta).norm(),
        2.0 * (v * bq * bc * beta).norm() + (w * ac * alpha * bq).norm(),
        (w * aq * bq).norm(),
        (u * ac * ac * alpha * alpha).norm() + (v * bc * bc * beta * beta).norm() + (w * ac * alpha * bc * beta).norm(),
    ]
    .iter()
    .map(|b| b * b)
    .sum::<f64>()
    .sqrt();
    let raw_norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if raw_norm <= CANCELLATION_TOL * bound {
        return Err(Error::ZeroCoincidence {
            weight: raw_norm * raw_norm * s.powi(4),
        });
    }

    let mut state = JointState::normalize(c)?;
    state.scale *= s * s;
    let weight = state.coincidence_weight();
    if weight < MIN_COINCIDENCE_WEIGHT {
        return Err(Error::ZeroCoincidence { weight });
    }
    Ok(state)
}

/// Independent construction of the heralded state in the full truncated space
/// A_q ⊗ A_{−q} ⊗ B_q ⊗ B_{−q} ⊗ field_a ⊗ field_b.
///
/// The detector operators are assembled as explicit sparse matrices from the
/// scattering coefficients, applied to |0,0⟩ ⊗ |α, β⟩ with coherent states cut
/// at `photon_cutoff`, and the result is projected onto ⟨α, β|.
pub fn brute_force_oracle(
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
    probe_a: &ProbeField,
    probe_b: &ProbeField,
    bs: &BeamSplitter,
    photon_cutoff: usize,
) -> Result<JointState> {
    brute_force_oracle_with(
        coeffs_a,
        coeffs_b,
        probe_a,
        probe_b,
        bs,
        photon_cutoff,
        2,
    )
}

pub fn brute_force_oracle_with(
    coeffs_a: &ScatterCoeffs,
    coeffs_b: &ScatterCoeffs,
    probe_a: &ProbeField,
    probe_b: &ProbeField,
    bs: &BeamSplitter,
    photon_cutoff: usize,
    n_max: usize,
) -> Result<JointState> {
    for p in [probe_a, probe_b] {
        if p.amplitude().norm() > 1.0 {
            return Err(Error::Domain(format!(
                "oracle requires |amplitude| ≤ 1, got {}",
                p.amplitude().norm()
            )));
        }
    }
    if photon_cutoff < 8 {
        return Err(Error::InvalidParameter {
            name: "photon_cutoff",
            reason: format!("must be at least 8, got {photon_cutoff}"),
        });
    }
    if n_max < 2 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: format!("must be at least 2, got {n_max}"),
        });
    }
    let coh_a = coherent(probe_a.amplitude(), photon_cutoff);
    let coh_b = coherent(probe_b.amplitude(), photon_cutoff);
    for coh in [&coh_a, &coh_b] {
        let tail = 1.0 - coh.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if tail > 1e-6 {
            return Err(Error::Truncation(format!(
                "coherent-state weight {tail:.2e} lies beyond photon cutoff {photon_cutoff}"
            )));
        }
    }

    const AQ: usize = 0;
    const AMQ: usize = 1;
    const BQ: usize = 2;
    const BMQ: usize = 3;
    const FA: usize = 4;
    const FB: usize = 5;
    let f = photon_cutoff + 1;
    let space = Space::new(vec![n_max + 1, 2, n_max + 1, 2, f, f]);

    let c_a = space
        .create(AQ)
        .scaled(coeffs_a.a_q)
        .plus(space.annihilate(AMQ).scaled(coeffs_a.a_minus_q))
        .plus(space.annihilate(FA).scaled(coeffs_a.a_c));
    let c_b = space
        .create(BQ)
        .scaled(coeffs_b.a_q)
        .plus(space.annihilate(BMQ).scaled(coeffs_b.a_minus_q))
        .plus(space.annihilate(FB).scaled(coeffs_b.a_c));
    let d1 = c_b.scaled(bs.t_prime()).plus(c_a.scaled(bs.r()));
    let d2 = c_a.scaled(bs.t()).plus(c_b.scaled(bs.r_prime()));

    let mut psi0 = vec![ZERO; space.size()];
    for (k, ca) in coh_a.iter().enumerate() {
        for (l, cb) in coh_b.iter().enumerate() {
            psi0[space.index(&[0, 0, 0, 0, k, l])] = ca * cb;
        }
    }
    let psi = d2.apply(&d1.apply(&psi0));

    let mut c = Array2::zeros((n_max + 1, n_max + 1));
    let mut leaked = 0.0;
    let mut kept = 0.0;
    for m in 0..=n_max {
        for mq in 0..2 {
            for n in 0..=n_max {
                for nq in 0..2 {
                    let mut amp = ZERO;
                    for (k, ca) in coh_a.iter().enumerate() {
                        for (l, cb) in coh_b.iter().enumerate() {
                            amp += ca.conj() * cb.conj() * psi[space.index(&[m, mq, n, nq, k, l])];
                        }
                    }
                    if mq == 0 && nq == 0 {
                        c[[m, n]] = amp;
                        kept += amp.norm_sqr();
                    } else {
                        leaked += amp.norm_sqr();
                    }
                }
            }
        }
    }
    if leaked > 1e-20 * kept.max(f64::MIN_POSITIVE) {
        return Err(Error::Truncation(format!(
            "opposite-momentum modes picked up weight {leaked:.2e}"
        )));
    }
    JointState::from_amplitudes(c)
}

/// Truncated coherent state e^{−|α|²/2} α^n / √n!, n = 0..=cutoff.
fn coherent(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Tensor-product space of truncated bosonic modes; mode 0 is most significant.
struct Space {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Space {
    fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self { dims, strides }
    }

    fn size(&self) -> usize {
        self.dims.iter().product()
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Embeds a single-mode operator given as (to, from, value) elements.
    fn embed(&self, mode: usize, local: &[(usize, usize, f64)]) -> SparseOp {
        let stride = self.strides[mode];
        let dim = self.dims[mode];
        let mut entries = Vec::new();
        for g in 0..self.size() {
            let digit = (g / stride) % dim;
            for &(to, from, val) in local {
                if from == digit {
                    let row = g + to * stride - from * stride;
                    entries.push((row, g, Complex64::new(val, 0.0)));
                }
            }
        }
        SparseOp {
            size: self.size(),
            entries,
        }
    }

    fn annihilate(&self, mode: usize) -> SparseOp {
        let local: Vec<_> = (1..self.dims[mode])
            .map(|n| (n - 1, n, (n as f64).sqrt()))
            .collect();
        self.embed(mode, &local)
    }

    fn create(&self, mode: usize) -> SparseOp {
        let local: Vec<_> = (0..self.dims[mode] - 1)
            .map(|n| (n + 1, n, ((n + 1) as f64).sqrt()))
            .collect();
        self.embed(mode, &local)
    }
}

/// Coordinate-list operator; duplicate coordinates add.
#[derive(Clone)]
struct SparseOp {
    size: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn scaled(&self, s: Complex64) -> SparseOp {
        SparseOp {
            size: self.size,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
        }
    }

    fn plus(mut self, other: SparseOp) -> SparseOp {
        self.entries.extend(other.entries);
        self
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.size];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}
