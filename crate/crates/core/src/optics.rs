//! Beam splitter and detector-mode couplings.
//!
//! Reflection carries a π/2 phase: with t = |t|e^{iφ} and t' = |t|e^{iφ'},
//! r = i|r|e^{iφ} and r' = i|r|e^{iφ'}. The detectors see
//! C_{D1} = r c_a + t' c_b and C_{D2} = t c_a + r' c_b.

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    t_mag: f64,
    phi: f64,
    phi_prime: f64,
}

pub fn make_beam_splitter(t_mag: f64, phi: f64, phi_prime: f64) -> Result<BeamSplitter> {
    if !(0.0..=1.0).contains(&t_mag) {
        return Err(Error::Domain(format!("|t| must lie in [0, 1], got {t_mag}")));
    }
    if !(phi.is_finite() && phi_prime.is_finite()) {
        return Err(Error::Domain("beam-splitter phases must be finite".into()));
    }
    Ok(BeamSplitter {
        t_mag,
        phi,
        phi_prime,
    })
}

impl BeamSplitter {
    pub fn balanced() -> Self {
        Self {
            t_mag: std::f64::consts::FRAC_1_SQRT_2,
            phi: 0.0,
            phi_prime: 0.0,
        }
    }

    pub fn t_mag(&self) -> f64 {
        self.t_mag
    }

    pub fn r_mag(&self) -> f64 {
        (1.0 - self.t_mag * self.t_mag).max(0.0).sqrt()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn phi_prime(&self) -> f64 {
        self.phi_prime
    }

    pub fn t(&self) -> Complex64 {
        Complex64::from_polar(self.t_mag, self.phi)
    }

    pub fn t_prime(&self) -> Complex64 {
        Complex64::from_polar(self.t_mag, self.phi_prime)
    }

    pub fn r(&self) -> Complex64 {
        Complex64::i() * Complex64::from_polar(self.r_mag(), self.phi)
    }

    pub fn r_prime(&self) -> Complex64 {
        Complex64::i() * Complex64::from_polar(self.r_mag(), self.phi_prime)
    }

    /// Magnitudes of (r*t' + r't*, r*t + r't'*, |r|² + |t|² − 1).
    pub fn reciprocity_defects(&self) -> [f64; 3] {
        let (r, rp, t, tp) = (self.r(), self.r_prime(), self.t(), self.t_prime());
        [
            (r.conj() * tp + rp * t.conj()).norm(),
            (r.conj() * t + rp * tp.conj()).norm(),
            (r.norm_sqr() + t.norm_sqr() - 1.0).abs(),
        ]
    }
}

/// Couplings of the two detector annihilators to the scattered modes c_a, c_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorCouplings {
    pub d1_a: Complex64,
    pub d1_b: Complex64,
    pub d2_a: Complex64,
    pub d2_b: Complex64,
}

pub fn detector_couplings(bs: &BeamSplitter) -> DetectorCouplings {
    DetectorCouplings {
        d1_a: bs.r(),
        d1_b: bs.t_prime(),
        d2_a: bs.t(),
        d2_b: bs.r_prime(),
    }
}

impl DetectorCouplings {
    /// [[d1_a, d1_b], [d2_a, d2_b]]
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.d1_a, self.d1_b], [self.d2_a, self.d2_b]]
    }

    /// max |(U U†)_{ij} − δ_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        let u = self.matrix();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s = u[i][0] * u[j][0].conj() + u[i][1] * u[j][1].conj();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Which sign to use for the |Σ_A, Σ_B⟩ branch of an unbalanced splitter.
///
/// The direct expansion gives rr' + tt' = e^{i(φ+φ')}(|t|² − |r|²). The
/// closed form usually quoted after extracting phases carries the opposite
/// sign, (|r|² − |t|²). The two agree at 50:50 where the branch vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossTermConvention {
    #[default]
    DirectExpansion,
    QuotedSign,
}

/// Amplitudes of C_{D2} C_{D1} = u c_a² + v c_b² + w c_a c_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAmplitudes {
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
}

impl PairAmplitudes {
    pub fn from_couplings(d: &DetectorCouplings) -> Self {
        Self {
            u: d.d2_a * d.d1_a,
            v: d.d2_b * d.d1_b,
            w: d.d2_a * d.d1_b + d.d2_b * d.d1_a,
        }
    }

    pub fn from_beam_splitter(bs: &BeamSplitter, convention: CrossTermConvention) -> Self {
        let mut p = Self::from_couplings(&detector_couplings(bs));
        if convention == CrossTermConvention::QuotedSign {
            p.w = -p.w;
        }
        p
    }
}
