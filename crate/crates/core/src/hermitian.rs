//! Dense complex Hermitian matrices: Jacobi eigenvalues, Cholesky
//! factorization, and the circulant/DFT block spectra both symmetry
//! reductions are built on.
//!
//! Everything here is deterministic: fixed sweep orders, no randomization,
//! so certificates verify to the same margins on every run.

use crate::{Error, Result};
use num_complex::Complex64;

/// Certified absolute eigenvalue tolerance for a matrix with the given
/// spectral-radius estimate. Jacobi delivers ~machine-epsilon * norm; this
/// is a comfortably safe envelope used in all PSD decisions.
pub fn tol_eig(spectral_radius_est: f64) -> f64 {
    1e-9 * (1.0 + spectral_radius_est.abs())
}

/// Outcome of a PSD test: the caller sees the margin, not just a boolean,
/// so bounds can be safe-rounded instead of trusted.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    /// Absolute accuracy of `min_eigenvalue`.
    pub tol: f64,
}

impl PsdReport {
    pub fn is_psd_at(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }
}

/// Dense Hermitian matrix, full row-major storage with the conjugate
/// symmetry maintained by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMat {
    pub fn zeros(dim: usize) -> HermitianMat {
        HermitianMat {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> HermitianMat {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from the upper triangle (i <= j); the lower triangle is the
    /// conjugate. Imaginary parts on the diagonal are dropped.
    pub fn from_fn_upper(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> HermitianMat {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                let v = if i == j { Complex64::new(v.re, 0.0) } else { v };
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v.conj();
            }
        }
        m
    }

    /// Validates that `entries` (row-major, dim x dim) is Hermitian within
    /// `tol` and builds the matrix from its upper triangle.
    pub fn from_entries(dim: usize, entries: &[Complex64], tol: f64) -> Result<HermitianMat> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                let delta = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                if delta > tol {
                    return Err(Error::InvalidParameter(format!(
                        "not Hermitian: |A[{i}][{j}] - conj(A[{j}][{i}])| = {delta:.3e}"
                    )));
                }
            }
        }
        Ok(Self::from_fn_upper(dim, |i, j| entries[i * dim + j]))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> HermitianMat {
        Self::from_fn_upper(dim, |i, j| Complex64::new(entries[i * dim + j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Sets entry (i,j) of the upper triangle and mirrors the conjugate.
    pub fn set_upper(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i <= j);
        let v = if i == j { Complex64::new(v.re, 0.0) } else { v };
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v.conj();
    }

    pub fn add_assign(&mut self, other: &HermitianMat) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn add_to_diag(&mut self, shift: &[f64]) {
        assert_eq!(shift.len(), self.dim);
        for (i, s) in shift.iter().enumerate() {
            self.data[i * self.dim + i].re += s;
        }
    }

    pub fn add_scalar_diag(&mut self, s: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i].re += s;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in self.data.iter_mut() {
            *a *= s;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Gershgorin bound on the spectral radius: max row absolute sum.
    pub fn spectral_radius_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.data[i * self.dim + j].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, ascending, by cyclic complex Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs = self.jacobi(None);
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    /// Eigenvalues (unsorted) and the matching unitary eigenvector matrix,
    /// column-major: column k is the eigenvector of the k-th value.
    pub fn eigen_decomposition(&self) -> (Vec<f64>, Vec<Complex64>) {
        let n = self.dim;
        let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            vecs[i * n + i] = Complex64::new(1.0, 0.0);
        }
        let eigs = self.jacobi(Some(&mut vecs));
        (eigs, vecs)
    }

    fn jacobi(&self, mut vectors: Option<&mut [Complex64]>) -> Vec<f64> {
        let n = self.dim;
        if n == 0 {
            return vec![];
        }
        let mut a = self.data.clone();
        let fro2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let stop = (fro2 + f64::MIN_POSITIVE) * 1e-30;
        for _sweep in 0..80 {
            let mut off2 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off2 += a[p * n + q].norm_sqr();
                }
            }
            if 2.0 * off2 <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, n, p, q, vectors.as_deref_mut());
                }
            }
        }
        (0..n).map(|i| a[i * n + i].re).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// PSD test with the margin exposed; tolerance derives from the
    /// spectral radius of the matrix itself.
    pub fn psd_report(&self) -> PsdReport {
        PsdReport {
            min_eigenvalue: if self.dim == 0 { 0.0 } else { self.min_eigenvalue() },
            tol: tol_eig(self.spectral_radius_bound()),
        }
    }

    /// Cholesky factor A = L L*; None if a pivot is not strictly positive,
    /// i.e. the matrix is not numerically positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.data[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let dj = d.sqrt();
            l[j * n + j] = Complex64::new(dj, 0.0);
            for i in (j + 1)..n {
                let mut v = self.data[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = v / dj;
            }
        }
        Some(Cholesky { dim: n, l })
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
pub struct Cholesky {
    dim: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn log_det(&self) -> f64 {
        (0..self.dim)
            .map(|j| self.l[j * self.dim + j].re.ln())
            .sum::<f64>()
            * 2.0
    }

    /// Full Hermitian inverse A^{-1} = L^{-*} L^{-1}.
    pub fn inverse(&self) -> HermitianMat {
        let n = self.dim;
        // forward-substitute to invert L (lower triangular)
        let mut w = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            w[j * n + j] = Complex64::new(1.0 / self.l[j * n + j].re, 0.0);
            for i in (j + 1)..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in j..i {
                    s += self.l[i * n + k] * w[k * n + j];
                }
                w[i * n + j] = -s / self.l[i * n + i].re;
            }
        }
        // A^{-1}[i][j] = sum_k conj(W[k][i]) W[k][j]
        HermitianMat::from_fn_upper(n, |i, j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j.max(i)..n {
                s += w[k * n + i].conj() * w[k * n + j];
            }
            s
        })
    }
}

fn jacobi_rotate(
    a: &mut [Complex64],
    n: usize,
    p: usize,
    q: usize,
    vectors: Option<&mut [Complex64]>,
) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g < 1e-300 {
        a[p * n + q] = Complex64::new(0.0, 0.0);
        a[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let alpha = a[p * n + p].re;
    let beta = a[q * n + q].re;
    let phase = apq / g; // e^{i phi}
    // zero condition: c s (alpha - beta) + g (c^2 - s^2) = 0, i.e. with
    // t = s/c and tau = (alpha - beta) / 2g: t^2 - 2 tau t - 1 = 0;
    // take the smaller-magnitude root for stability.
    let tau = (alpha - beta) / (2.0 * g);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = I except U[p][p]=c, U[p][q]=s*phase, U[q][p]=-s*conj(phase), U[q][q]=c
    // applied as A <- U* A U; zeroes (p,q) exactly.
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = akp * c - akq * s * phase.conj();
        let new_kq = akp * s * phase + akq * c;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp.conj();
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq.conj();
    }
    let csg = 2.0 * c * s * g;
    a[p * n + p] = Complex64::new(c * c * alpha - csg + s * s * beta, 0.0);
    a[q * n + q] = Complex64::new(s * s * alpha + csg + c * c * beta, 0.0);
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    if let Some(v) = vectors {
        // accumulate V <- V U so columns track the eigenvectors
        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = vkp * c - vkq * s * phase.conj();
            v[k * n + q] = vkp * s * phase + vkq * c;
        }
    }
}

/// Eigenvalue of the (i,j) circulant adjacency block of G_n at frequency m:
///
///   lambda_m = sum_{k=1}^{i-1} w^{mk} + sum_{k=n-j+1}^{n-j+i-1} w^{mk},
///   w = e^{-2 pi sqrt(-1) / n}.
///
/// The block's circulant first row has ones exactly at those k, so this is
/// its DFT. Requires 2 <= i <= j <= floor(n/2) and 0 <= m <= n-1.
pub fn circulant_block_eigs(i: u32, j: u32, n: u32, m: u32) -> Result<Complex64> {
    if !(2 <= i && i <= j && j <= n / 2) {
        return Err(Error::InvalidParameter(format!(
            "distance pair ({i},{j}) out of range for n={n}"
        )));
    }
    if m >= n {
        return Err(Error::InvalidParameter(format!(
            "frequency {m} out of range for n={n}"
        )));
    }
    let omega = |k: u64| -> Complex64 {
        let angle = -2.0 * std::f64::consts::PI * (m as f64) * (k as f64) / (n as f64);
        Complex64::new(angle.cos(), angle.sin())
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..i as u64 {
        sum += omega(k);
    }
    for k in (n - j + 1) as u64..(n - j + i) as u64 {
        sum += omega(k);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::build_chord_graph;

    #[test]
    fn identity_eigenvalues() {
        let eigs = HermitianMat::identity(3).eigenvalues();
        for e in eigs {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_like_matrix() {
        let i = Complex64::new(0.0, 1.0);
        let m = HermitianMat::from_fn_upper(2, |r, c| {
            if (r, c) == (0, 1) { i } else { Complex64::new(0.0, 0.0) }
        });
        let eigs = m.eigenvalues();
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_laplacian_spectrum() {
        // Laplacian of C_5: eigenvalues 2 - 2cos(2 pi k / 5)
        let n = 5;
        let m = HermitianMat::from_fn_upper(n, |i, j| {
            if i == j {
                Complex64::new(2.0, 0.0)
            } else if j == i + 1 || (i == 0 && j == n - 1) {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut expected: Vec<f64> = (0..n)
            .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let eigs = m.eigenvalues();
        for (e, x) in eigs.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-10, "{e} vs {x}");
        }
    }

    fn seeded_hermitian(dim: usize, seed: u64) -> HermitianMat {
        // cheap deterministic pseudo-entries; no need for a real RNG here
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        HermitianMat::from_fn_upper(dim, |i, j| {
            if i == j {
                Complex64::new(4.0 * next(), 0.0)
            } else {
                Complex64::new(next(), next())
            }
        })
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        for dim in [2, 5, 17, 40] {
            let m = seeded_hermitian(dim, dim as u64);
            let sum: f64 = m.eigenvalues().iter().sum();
            let tr = m.trace();
            assert!(
                (sum - tr).abs() <= 1e-8 * (1.0 + tr.abs()),
                "dim={dim}: {sum} vs {tr}"
            );
        }
    }

    #[test]
    fn cholesky_inverse_and_logdet() {
        let dim = 12;
        let b = seeded_hermitian(dim, 99);
        // A = B^2 + 5 I is PD
        let mut a = HermitianMat::from_fn_upper(dim, |i, j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                s += b.get(i, k) * b.get(k, j);
            }
            s
        });
        a.add_scalar_diag(5.0);
        let ch = a.cholesky().expect("PD");
        let logdet_eigs: f64 = a.eigenvalues().iter().map(|e| e.ln()).sum();
        assert!((ch.log_det() - logdet_eigs).abs() < 1e-8 * (1.0 + logdet_eigs.abs()));
        let inv = ch.inverse();
        for i in 0..dim {
            for j in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += a.get(i, k) * inv.get(k, j);
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).norm() < 1e-9, "({i},{j}): {s}");
            }
        }
    }

    #[test]
    fn eigen_decomposition_reconstructs() {
        let dim = 9;
        let m = seeded_hermitian(dim, 7);
        let (eigs, vecs) = m.eigen_decomposition();
        for k in 0..dim {
            // A v_k = lambda_k v_k
            for i in 0..dim {
                let mut av = Complex64::new(0.0, 0.0);
                for j in 0..dim {
                    av += m.get(i, j) * vecs[j * dim + k];
                }
                let want = vecs[i * dim + k] * eigs[k];
                assert!((av - want).norm() < 1e-9, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut m = HermitianMat::identity(3);
        m.add_scalar_diag(-2.0);
        assert!(m.cholesky().is_none());
    }

    #[test]
    fn circulant_eigs_at_zero_frequency() {
        for (i, j, n) in [(2, 2, 5), (2, 3, 7), (3, 3, 7), (4, 5, 11)] {
            let v = circulant_block_eigs(i, j, n, 0).unwrap();
            assert!((v.re - 2.0 * (i as f64 - 1.0)).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_eigs_g5_value() {
        let v = circulant_block_eigs(2, 2, 5, 1).unwrap();
        let want = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos(); // 0.618034
        assert!((v.re - want).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
        assert!((want - 0.618034).abs() < 1e-6);
    }

    #[test]
    fn circulant_eigs_conjugate_symmetry() {
        for n in 5..=13u32 {
            for i in 2..=(n / 2).min(6) {
                for j in i..=(n / 2).min(6) {
                    for m in 1..n {
                        let a = circulant_block_eigs(i, j, n, m).unwrap();
                        let b = circulant_block_eigs(i, j, n, n - m).unwrap();
                        assert!((a - b.conj()).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn circulant_eigs_range_checks() {
        assert!(circulant_block_eigs(1, 2, 7, 0).is_err());
        assert!(circulant_block_eigs(3, 2, 7, 0).is_err());
        assert!(circulant_block_eigs(2, 4, 7, 0).is_err());
        assert!(circulant_block_eigs(2, 2, 7, 7).is_err());
    }

    /// The DFT block spectra assembled over all frequencies must equal the
    /// spectrum of the full adjacency matrix of G_n (they are unitarily
    /// equivalent through the circulant diagonalization).
    #[test]
    fn block_spectra_match_full_adjacency() {
        for n in [5u32, 7, 9] {
            let g = build_chord_graph(n).unwrap();
            let p = g.vertex_count();
            let adj = HermitianMat::from_fn_upper(p, |i, j| {
                if g.are_adjacent(i, j) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let mut full = adj.eigenvalues();

            let d = n / 2;
            let dim = (d - 1) as usize;
            let mut assembled = Vec::new();
            for m in 0..n {
                let block = HermitianMat::from_fn_upper(dim, |bi, bj| {
                    let (i, j) = ((bi + 2) as u32, (bj + 2) as u32);
                    circulant_block_eigs(i.min(j), i.max(j), n, m).unwrap()
                });
                assembled.extend(block.eigenvalues());
            }
            assembled.sort_by(|a, b| a.partial_cmp(b).unwrap());
            full.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(full.len(), assembled.len());
            for (a, b) in full.iter().zip(&assembled) {
                assert!((a - b).abs() < 1e-8, "n={n}: {a} vs {b}");
            }
        }
    }
}
