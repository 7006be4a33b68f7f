//! Truncated two-mode bosonic linear algebra.
//!
//! Basis index convention: |m, n⟩ ↦ i = m·(n_max + 1) + n.

use ndarray::Array2;
use num_complex::Complex64;

use crate::projection::JointState;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance on Σ|C|² − 1 for inputs that must be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Tolerance on ‖A − A†‖_max for inputs that must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_max: usize,
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// (n_max + 1)²
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diag().sum()
    }

    pub fn partial_transpose(&self) -> Array2<Complex64> {
        transpose_b(&self.entries, self.n_max + 1)
    }
}

/// Collection of PT eigenvalues, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PtSpectrum {
    pub eigenvalues: Vec<f64>,
    pub min_eig: f64,
}

impl PtSpectrum {
    pub fn of(rho: &DensityMatrix) -> Result<Self> {
        let eigenvalues = hermitian_eigenvalues(&rho.partial_transpose())?;
        let min_eig = eigenvalues[0];
        Ok(Self {
            eigenvalues,
            min_eig,
        })
    }
}

fn require_normalized(state: &JointState) -> Result<()> {
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// ρ = |Φ⟩⟨Φ|.
pub fn density_matrix(state: &JointState) -> Result<DensityMatrix> {
    require_normalized(state)?;
    let psi: Vec<Complex64> = state.amplitudes().iter().copied().collect();
    let dim = psi.len();
    let entries = Array2::from_shape_fn((dim, dim), |(i, j)| psi[i] * psi[j].conj());
    Ok(DensityMatrix {
        n_max: state.n_max(),
        entries,
    })
}

/// Transpose on subsystem B: ⟨i j|ρ^{T_B}|m n⟩ = ⟨i n|ρ|m j⟩.
pub fn partial_transpose(rho: &Array2<Complex64>, n_max: usize) -> Result<Array2<Complex64>> {
    let d = n_max + 1;
    let (rows, cols) = rho.dim();
    if rows != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: rows,
        });
    }
    if cols != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: cols,
        });
    }
    Ok(transpose_b(rho, d))
}

fn transpose_b(rho: &Array2<Complex64>, d: usize) -> Array2<Complex64> {
    let dim = d * d;
    Array2::from_shape_fn((dim, dim), |(row, col)| {
        let (i, j) = (row / d, row % d);
        let (m, n) = (col / d, col % d);
        rho[[i * d + n, m * d + j]]
    })
}

pub fn hermitian_deviation(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a)?.0)
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching unit eigenvectors
/// as the columns of the second element.
pub fn hermitian_eigen(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let deviation = hermitian_deviation(a);
    let scale = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    // symmetrize so roundoff in the input cannot bias the rotations
    let mut h = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| if i == j { Complex64::new(1.0, 0.0) } else { ZERO });

    let frob: f64 = h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[[i, j]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = h[[p, q]];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = h[[p, p]].re;
                let aqq = h[[q, q]].re;
                // U = diag(1, e^{−iφ}) · [[c, s], [−s, c]] on the (p, q) plane
                let phase = (apq / mag).conj();
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -s * phase;
                let g_qq = c * phase;
                // H ← H U
                for k in 0..n {
                    let hp = h[[k, p]];
                    let hq = h[[k, q]];
                    h[[k, p]] = hp * g_pp + hq * g_qp;
                    h[[k, q]] = hp * g_pq + hq * g_qq;
                }
                // H ← U† H
                for k in 0..n {
                    let hp = h[[p, k]];
                    let hq = h[[q, k]];
                    h[[p, k]] = g_pp.conj() * hp + g_qp.conj() * hq;
                    h[[q, k]] = g_pq.conj() * hp + g_qq.conj() * hq;
                }
                h[[p, q]] = ZERO;
                h[[q, p]] = ZERO;
                h[[p, p]] = Complex64::new(h[[p, p]].re, 0.0);
                h[[q, q]] = Complex64::new(h[[q, q]].re, 0.0);
                for k in 0..n {
                    let vp = v[[k, p]];
                    let vq = v[[k, q]];
                    v[[k, p]] = vp * g_pp + vq * g_qp;
                    v[[k, q]] = vp * g_pq + vq * g_qq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[[i, i]].re.total_cmp(&h[[j, j]].re));
    let values = order.iter().map(|&i| h[[i, i]].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok((values, vectors))
}

/// Singular values of the amplitude matrix, descending.
pub fn schmidt_coefficients(state: &JointState) -> Vec<f64> {
    let c = state.amplitudes();
    let gram = c.t().mapv(|x| x.conj()).dot(c);
    // the Gram matrix is Hermitian by construction
    let mut values: Vec<f64> = hermitian_eigenvalues(&gram)
        .expect("C†C is Hermitian")
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    values.reverse();
    values
}

/// PT spectrum of a pure state from its Schmidt values: {λ_i²} ∪ {±λ_iλ_j, i<j}, ascending.
pub fn pt_spectrum_oracle(schmidt: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = schmidt.iter().map(|l| l * l).collect();
    for i in 0..schmidt.len() {
        for j in (i + 1)..schmidt.len() {
            let p = schmidt[i] * schmidt[j];
            out.push(p);
            out.push(-p);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// ⟨A†^p A^q B†^r B^s⟩ for a pure state.
///
/// Annihilators act first, so every intermediate state stays inside the
/// truncation and the result is exact for the stored amplitudes.
pub fn expectation(state: &JointState, powers: (u32, u32, u32, u32)) -> Result<Complex64> {
    let (p, q, r, s) = powers;
    let n_max = state.n_max() as u32;
    if p.max(q) > n_max || r.max(s) > n_max {
        return Err(Error::Truncation(format!(
            "moment powers {powers:?} exceed the per-mode truncation {n_max}"
        )));
    }
    let c = state.amplitudes();
    let d = state.local_dim();
    let mut total = ZERO;
    for m in (q as usize)..d {
        let m_out = m - q as usize + p as usize;
        if m_out >= d {
            continue;
        }
        let fa = ladder(m, q) * ladder(m_out, p);
        for n in (s as usize)..d {
            let n_out = n - s as usize + r as usize;
            if n_out >= d {
                continue;
            }
            let fb = ladder(n, s) * ladder(n_out, r);
            total += c[[m_out, n_out]].conj() * c[[m, n]] * (fa * fb);
        }
    }
    Ok(total)
}

/// √(n!/(n−k)!): the factor picked up by k annihilations from |n⟩.
fn ladder(n: usize, k: u32) -> f64 {
    (0..k as usize).map(|j| ((n - j) as f64).sqrt()).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> JointState {
        JointState::from_entries(2, &[(0, 1, c(1.0)), (1, 0, c(1.0))]).unwrap()
    }

    fn vacuum() -> JointState {
        JointState::from_entries(2, &[(0, 0, c(1.0))]).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Array2<Complex64> {
        let a = Array2::from_shape_fn((n, n), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] + a[[j, i]].conj())
    }

    #[test]
    fn vacuum_density_matrix() {
        let rho = density_matrix(&vacuum()).unwrap();
        assert_eq!(rho.dim(), 9);
        for ((i, j), x) in rho.entries().indexed_iter() {
            let expected = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            assert!((x - c(expected)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_density_matrix_entries() {
        let rho = density_matrix(&bell()).unwrap();
        let nonzero: Vec<_> = rho.entries().iter().filter(|x| x.norm() > 1e-12).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|x| (x.norm() - 0.5).abs() < 1e-12));
        assert!((rho.trace() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn pure_density_matrix_has_unit_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let amps = Array2::from_shape_fn((3, 3), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rho = density_matrix(&JointState::from_amplitudes(amps).unwrap()).unwrap();
        let ev = hermitian_eigenvalues(rho.entries()).unwrap();
        assert!((ev[8] - 1.0).abs() < 1e-12);
        assert!(ev[..8].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn product_state_stays_positive_under_pt() {
        let a = [c(0.6), Complex64::new(0.0, 0.8), c(0.0)];
        let b = [c(0.3), c(0.4), Complex64::new(0.5, -0.2)];
        let mut entries = Vec::new();
        for m in 0..3 {
            for n in 0..3 {
                entries.push((m, n, a[m] * b[n]));
            }
        }
        let s = JointState::from_entries(2, &entries).unwrap();
        let rho = density_matrix(&s).unwrap();
        let pt = rho.partial_transpose();
        // ρ_A ⊗ ρ_B^T
        let bn: f64 = b.iter().map(|x| x.norm_sqr()).sum();
        let an: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        for i in 0..3 {
            for j in 0..3 {
                for m in 0..3 {
                    for n in 0..3 {
                        let rho_a = a[i] * a[m].conj() / an;
                        let rho_b_t = b[n] * b[j].conj() / bn;
                        assert!((pt[[i * 3 + j, m * 3 + n]] - rho_a * rho_b_t).norm() < 1e-12);
                    }
                }
            }
        }
        let ev = hermitian_eigenvalues(&pt).unwrap();
        assert!(ev[0] > -1e-12);
    }

    #[test]
    fn bell_pt_minimum() {
        let rho = density_matrix(&bell()).unwrap();
        let spec = PtSpectrum::of(&rho).unwrap();
        assert!((spec.min_eig + 0.5).abs() < 1e-10);
        assert!((spec.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pt_is_an_involution_and_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let amps = Array2::from_shape_fn((3, 3), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rho = density_matrix(&JointState::from_amplitudes(amps).unwrap()).unwrap();
        let once = partial_transpose(rho.entries(), 2).unwrap();
        let twice = partial_transpose(&once, 2).unwrap();
        assert_eq!(&twice, rho.entries());
        assert!((once.diag().sum() - c(1.0)).norm() < 1e-12);
        assert!(hermitian_deviation(&once) < 1e-15);
    }

    #[test]
    fn pt_dimension_mismatch() {
        let m = Array2::<Complex64>::zeros((8, 8));
        assert!(matches!(partial_transpose(&m, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn jacobi_simple_cases() {
        let eye = Array2::from_shape_fn((9, 9), |(i, j)| if i == j { c(1.0) } else { ZERO });
        assert!(hermitian_eigenvalues(&eye).unwrap().iter().all(|x| (x - 1.0).abs() < 1e-15));
        let x = Array2::from_shape_vec((2, 2), vec![ZERO, c(1.0), c(1.0), ZERO]).unwrap();
        let ev = hermitian_eigenvalues(&x).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_rejects_non_hermitian() {
        let x = Array2::from_shape_vec((2, 2), vec![ZERO, c(1.0), c(0.0), ZERO]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&x), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn jacobi_trace_identities_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 5, 9, 16] {
            let a = random_hermitian(&mut rng, n);
            let (ev, vecs) = hermitian_eigen(&a).unwrap();
            let trace: f64 = a.diag().iter().map(|x| x.re).sum();
            let frob: f64 = a.iter().map(|x| x.norm_sqr()).sum();
            assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
            assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-10);
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..n {
                let v = vecs.column(k);
                let av = a.dot(&v);
                let res: f64 = av.iter().zip(v.iter()).map(|(x, y)| (x - y * ev[k]).norm_sqr()).sum();
                assert!(res.sqrt() <= 1e-9, "n {n} k {k} residual {}", res.sqrt());
            }
        }
    }

    #[test]
    fn schmidt_of_simple_states() {
        let prod = schmidt_coefficients(&vacuum());
        assert!((prod[0] - 1.0).abs() < 1e-12 && prod[1..].iter().all(|x| x.abs() < 1e-7));
        let b = schmidt_coefficients(&bell());
        assert!((b[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((b[1] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(b[2].abs() < 1e-7);
    }

    #[test]
    fn pt_oracle_formula() {
        let trivial = pt_spectrum_oracle(&[1.0, 0.0, 0.0]);
        assert_eq!(trivial.len(), 9);
        assert_eq!(trivial.iter().filter(|&&x| x == 1.0).count(), 1);
        let h = FRAC_1_SQRT_2;
        let bell = pt_spectrum_oracle(&[h, h, 0.0]);
        let expected = [-0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5];
        for (x, y) in bell.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_moments() {
        let s = bell();
        assert!((expectation(&s, (1, 1, 0, 0)).unwrap() - c(0.5)).norm() < 1e-15);
        assert!((expectation(&s, (1, 0, 0, 1)).unwrap() - c(0.5)).norm() < 1e-15);
        assert!(expectation(&s, (2, 0, 0, 2)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn pair_moment_on_cross_shaped_state() {
        // ⟨A†²B²⟩ = √2·√2·conj(C[2][0])·C[0][2]
        let s = JointState::from_entries(2, &[(2, 0, c(0.6)), (0, 2, Complex64::new(0.0, 0.8))]).unwrap();
        let expected = 2.0 * s.amplitude(2, 0).conj() * s.amplitude(0, 2);
        assert!((expectation(&s, (2, 0, 0, 2)).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn moment_powers_beyond_truncation() {
        assert!(matches!(expectation(&vacuum(), (3, 0, 0, 0)), Err(Error::Truncation(_))));
    }
}
