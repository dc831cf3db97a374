//! Dense complex hermitian matrices.
//!
//! Everything here works on small matrices (d <= 64) stored row-major as
//! `Complex64`. The eigensolver is a cyclic complex Jacobi method, which is
//! accurate to a few ulps at these sizes and needs no external library.
//! Real rectangular problems (nullspaces) go through nalgebra's SVD.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Off-diagonal asymmetry above this is rejected by the constructor.
pub const HERMITIAN_REJECT_TOL: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
pub const DEFAULT_RANK_TOL: f64 = 1e-6;
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    /// Builds a hermitian matrix from row-major entries. Small asymmetries
    /// are averaged away; anything above [`HERMITIAN_REJECT_TOL`] is an error.
    pub fn new(dim: usize, mut data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let a = data[i * dim + j];
                let b = data[j * dim + i].conj();
                worst = worst.max((a - b).norm());
                let avg = (a + b) * 0.5;
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        if !(worst <= HERMITIAN_REJECT_TOL) {
            return Err(Error::NotHermitian(worst));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_raw_unchecked(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * dim + i] = C64::new(x, 0.0);
        }
        m
    }

    /// Single-qubit Pauli matrix for `I`, `X`, `Y` or `Z`.
    pub fn pauli(letter: char) -> Result<Self> {
        let i = C64::new(0.0, 1.0);
        let data = match letter {
            'I' => vec![ONE, ZERO, ZERO, ONE],
            'X' => vec![ZERO, ONE, ONE, ZERO],
            'Y' => vec![ZERO, -i, i, ZERO],
            'Z' => vec![ONE, ZERO, ZERO, -ONE],
            other => return Err(Error::Parse(format!("unknown Pauli letter '{other}'"))),
        };
        Ok(Self::from_raw_unchecked(2, data))
    }

    /// Tensor product of Pauli letters, leftmost letter on the most
    /// significant tensor factor, e.g. `"IZX"`.
    pub fn pauli_word(word: &str) -> Result<Self> {
        let mut out = Self::identity(1);
        for c in word.chars() {
            out = kron(&out, &Self::pauli(c)?);
        }
        Ok(out)
    }

    /// Rank-one projector |v><v| (v is used as given, not normalized).
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = v[i] * v[j].conj();
            }
        }
        Self::from_raw_unchecked(n, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.data[i * n + j].norm() <= tol))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim + i].re)
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_raw_unchecked(self.dim, self.data.iter().map(|z| z * s).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        Self::from_raw_unchecked(
            self.dim,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * s)
                .collect(),
        )
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(ZERO, |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// General (not necessarily hermitian) product, row-major.
    pub fn matmul_raw(&self, other: &Self) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(n, other.dim);
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let e = eig_hermitian(self)?;
        Ok(e.eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs())))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_file(&self) -> MatrixFile {
        let n = self.dim;
        MatrixFile {
            dim: n,
            re: (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j).re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j).im).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        let n = file.dim;
        if file.re.len() != n || file.im.len() != n {
            return Err(Error::Parse(format!(
                "matrix file declares dim {n} but has {} / {} rows",
                file.re.len(),
                file.im.len()
            )));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            if file.re[i].len() != n || file.im[i].len() != n {
                return Err(Error::Parse(format!("row {i} does not have {n} entries")));
            }
            for j in 0..n {
                data.push(C64::new(file.re[i][j], file.im[i][j]));
            }
        }
        Self::new(n, data)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(s)?;
        Self::from_file(&file)
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im == 0.0 {
                        format!("{:8.4}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

/// On-disk matrix format: `{"dim": d, "re": [[..]], "im": [[..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    let (n, m) = (a.dim, b.dim);
    let d = n * m;
    let mut data = vec![ZERO; d * d];
    for i in 0..n {
        for j in 0..n {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    data[(i * m + k) * d + (j * m + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    HermitianMatrix::from_raw_unchecked(d, data)
}

/// Hilbert-Schmidt inner product Tr(A B) of two hermitian matrices.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(hs_inner_raw(&a.data, &b.data))
}

#[inline]
pub(crate) fn hs_inner_raw(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

pub fn vec_inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Nondecreasing.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut out = HermitianMatrix::zeros(n);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out = out.add_scaled(&HermitianMatrix::outer(v), *l);
        }
        out
    }
}

fn off_diagonal_norm(m: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies the
/// classical real rotation. Sweeps stop once the off-diagonal Frobenius mass
/// falls below `1e-13 * ||A||_F`. Eigenvectors are phase-normalized so that
/// their first non-negligible component is real and positive.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim;
    let mut m = a.data.clone();
    let mut v = HermitianMatrix::identity(n).data;
    let threshold = JACOBI_REL_TOL * a.frobenius_norm();

    let mut sweep = 0;
    while off_diagonal_norm(&m, n) > threshold {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = m[p * n + q];
                let abs_b = b.norm();
                if abs_b == 0.0 {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // Skip pivots that are negligible against both diagonal entries.
                if abs_b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    m[p * n + q] = ZERO;
                    m[q * n + p] = ZERO;
                    continue;
                }
                let phase = b / abs_b;
                let theta = (aqq - app) / (2.0 * abs_b);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e_minus = phase.conj();
                // V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q).
                let vqp = -e_minus * s;
                let vqq = e_minus * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * c + akq * vqp;
                    m[k * n + q] = akp * s + akq * vqq;
                    let ukp = v[k * n + p];
                    let ukq = v[k * n + q];
                    v[k * n + p] = ukp * c + ukq * vqp;
                    v[k * n + q] = ukp * s + ukq * vqq;
                }
                let (cvqp, cvqq) = (vqp.conj(), vqq.conj());
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = apk * c + aqk * cvqp;
                    m[q * n + k] = apk * s + aqk * cvqq;
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| m[i * n + i].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<C64> = (0..n).map(|k| v[k * n + col]).collect();
            let norm = vec_norm(&vec);
            for z in vec.iter_mut() {
                *z /= norm;
            }
            if let Some(lead) = vec.iter().find(|z| z.norm() > 1e-10).copied() {
                let rot = lead.conj() / lead.norm();
                for z in vec.iter_mut() {
                    *z *= rot;
                }
            }
            vec
        })
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Orthogonal projector together with an orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct Projector {
    pub matrix: HermitianMatrix,
    pub rank: usize,
    pub range_basis: Vec<Vec<C64>>,
}

impl Projector {
    /// Projector onto the span of `vectors`, which must be orthonormal.
    pub fn from_orthonormal(dim: usize, vectors: Vec<Vec<C64>>) -> Self {
        let mut matrix = HermitianMatrix::zeros(dim);
        for v in &vectors {
            debug_assert_eq!(v.len(), dim);
            matrix = &matrix + &HermitianMatrix::outer(v);
        }
        Self {
            matrix,
            rank: vectors.len(),
            range_basis: vectors,
        }
    }

    /// Projector onto the span of arbitrary vectors (Gram-Schmidt, dropping
    /// vectors that are dependent to `1e-10`).
    pub fn from_span(dim: usize, vectors: &[Vec<C64>]) -> Self {
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for v in vectors {
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = vec_inner(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let norm = vec_norm(&w);
            if norm > 1e-10 * vec_norm(v).max(1e-300) {
                basis.push(w.into_iter().map(|z| z / norm).collect());
            }
        }
        Self::from_orthonormal(dim, basis)
    }

    /// Diagonal 0/1 projector onto the given computational basis states.
    pub fn from_basis_states(dim: usize, states: impl IntoIterator<Item = usize>) -> Self {
        let vectors = states
            .into_iter()
            .map(|s| {
                let mut v = vec![ZERO; dim];
                v[s] = ONE;
                v
            })
            .collect();
        Self::from_orthonormal(dim, vectors)
    }

    /// Reads a projector off a hermitian matrix, checking P^2 = P.
    pub fn from_matrix(p: &HermitianMatrix) -> Result<Self> {
        let e = eig_hermitian(p)?;
        let sq = HermitianMatrix::from_raw_unchecked(p.dim, p.matmul_raw(p));
        let resid = sq.max_abs_diff(p);
        if resid > 1e-8 {
            return Err(Error::Parse(format!(
                "matrix is not a projector (|P^2 - P| = {resid:e})"
            )));
        }
        let vectors = e
            .eigenvalues
            .iter()
            .zip(e.eigenvectors)
            .filter(|(l, _)| **l > 0.5)
            .map(|(_, v)| v)
            .collect();
        Ok(Self::from_orthonormal(p.dim, vectors))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// I - P.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        let comp = &HermitianMatrix::identity(d) - &self.matrix;
        // The eigenvalues of I - P are 0/1 up to rounding, so the split at 1/2
        // cannot fail.
        let e = eig_hermitian(&comp).expect("projector complement eigendecomposition");
        let vectors = e
            .eigenvalues
            .iter()
            .zip(e.eigenvectors)
            .filter(|(l, _)| **l > 0.5)
            .map(|(_, v)| v)
            .collect();
        Self::from_orthonormal(d, vectors)
    }

    pub fn distance(&self, other: &Projector) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

fn spectral_scale(e: &EigenDecomposition) -> f64 {
    e.max_abs().max(1.0)
}

/// Sum of the spectral projectors of all eigenvalues within
/// `gap_tol * max(1, ||A||)` of the smallest one.
pub fn ground_projector(a: &HermitianMatrix, gap_tol: f64) -> Result<Projector> {
    let e = eig_hermitian(a)?;
    Ok(ground_projector_from_eig(&e, gap_tol))
}

pub fn ground_projector_from_eig(e: &EigenDecomposition, gap_tol: f64) -> Projector {
    let cutoff = e.min() + gap_tol * spectral_scale(e);
    let vectors = e
        .eigenvalues
        .iter()
        .zip(&e.eigenvectors)
        .filter(|(l, _)| **l <= cutoff)
        .map(|(_, v)| v.clone())
        .collect();
    Projector::from_orthonormal(e.eigenvalues.len(), vectors)
}

/// Projector onto the eigenvectors of a positive semidefinite matrix with
/// eigenvalue above `gap_tol * max(1, ||rho||)`.
pub fn support_projector(rho: &HermitianMatrix, gap_tol: f64) -> Result<Projector> {
    let e = eig_hermitian(rho)?;
    let scale = spectral_scale(&e);
    if e.min() < -1e-8 * scale {
        return Err(Error::NotPositive(e.min()));
    }
    let cutoff = gap_tol * scale;
    let vectors = e
        .eigenvalues
        .iter()
        .zip(&e.eigenvectors)
        .filter(|(l, _)| **l > cutoff)
        .map(|(_, v)| v.clone())
        .collect();
    Ok(Projector::from_orthonormal(rho.dim(), vectors))
}

/// Kernel projector: eigenvectors with `|lambda| <= rel_tol * max(1, max|lambda|)`.
pub fn kernel_projector_from_eig(e: &EigenDecomposition, rel_tol: f64) -> Projector {
    let cutoff = rel_tol * spectral_scale(e);
    let vectors = e
        .eigenvalues
        .iter()
        .zip(&e.eigenvectors)
        .filter(|(l, _)| l.abs() <= cutoff)
        .map(|(_, v)| v.clone())
        .collect();
    Projector::from_orthonormal(e.eigenvalues.len(), vectors)
}

pub fn numerical_rank(a: &HermitianMatrix, rel_tol: f64) -> Result<usize> {
    Ok(rank_from_eig(&eig_hermitian(a)?, rel_tol))
}

pub fn rank_from_eig(e: &EigenDecomposition, rel_tol: f64) -> usize {
    let cutoff = rel_tol * spectral_scale(e);
    e.eigenvalues.iter().filter(|l| l.abs() > cutoff).count()
}

/// Orthonormal basis of `{x : R x = 0}` with the singular spectrum that
/// produced it.
#[derive(Clone, Debug)]
pub struct Nullspace {
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    /// All `m` singular values (zero-padded), nonincreasing.
    pub singular_values: Vec<f64>,
    /// Absolute cutoff that was applied.
    pub cutoff: f64,
}

impl Nullspace {
    /// Smallest singular value kept as nonzero, if any.
    pub fn smallest_kept(&self) -> Option<f64> {
        let kept = self.singular_values.len() - self.dimension;
        (kept > 0).then(|| self.singular_values[kept - 1])
    }

    /// Largest singular value treated as zero, if any.
    pub fn largest_dropped(&self) -> Option<f64> {
        let kept = self.singular_values.len() - self.dimension;
        self.singular_values.get(kept).copied()
    }
}

/// Real nullspace of the row system by singular-value thresholding at
/// `tol * sigma_max`.
pub fn real_nullspace(rows: &[Vec<f64>], m: usize, tol: f64) -> Result<Nullspace> {
    for r in rows {
        if r.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
    }
    if m == 0 {
        return Ok(Nullspace {
            dimension: 0,
            basis: vec![],
            singular_values: vec![],
            cutoff: 0.0,
        });
    }
    // Pad with zero rows so the SVD yields a full set of right singular vectors.
    let n_rows = rows.len().max(m);
    let mat = DMatrix::from_fn(n_rows, m, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut pairs: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma_max = pairs.first().map_or(0.0, |p| p.0);
    let cutoff = tol * sigma_max;
    let basis: Vec<Vec<f64>> = pairs
        .iter()
        .filter(|(s, _)| sigma_max == 0.0 || *s <= cutoff)
        .map(|&(_, i)| v_t.row(i).iter().copied().collect())
        .collect();
    Ok(Nullspace {
        dimension: basis.len(),
        basis,
        singular_values: pairs.iter().map(|p| p.0).collect(),
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_c(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::diagonal(v)
    }

    #[test]
    fn kron_of_identities_and_zz() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), HermitianMatrix::identity(4));
        let z = HermitianMatrix::pauli('Z').unwrap();
        assert_eq!(kron(&z, &z), diag_c(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn hs_inner_examples() {
        let i8 = HermitianMatrix::identity(8);
        assert_eq!(hs_inner(&i8, &i8).unwrap(), 8.0);
        let xii = HermitianMatrix::pauli_word("XII").unwrap();
        let yii = HermitianMatrix::pauli_word("YII").unwrap();
        assert_eq!(hs_inner(&xii, &yii).unwrap(), 0.0);
        let p = Projector::from_basis_states(8, [0, 3, 5]);
        assert!((hs_inner(&p.matrix, &i8).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(
            hs_inner(&i8, &HermitianMatrix::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructor_symmetrizes_and_rejects() {
        let mut data = vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 1e-11),
            C64::new(2.0, 0.0),
            C64::new(3.0, 0.0),
        ];
        let m = HermitianMatrix::new(2, data.clone()).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0).conj());
        data[1] = C64::new(2.0, 1e-6);
        assert!(matches!(
            HermitianMatrix::new(2, data),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eig_of_z_and_bloch_vector() {
        let z = HermitianMatrix::pauli('Z').unwrap();
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);

        let n = HermitianMatrix::pauli('X')
            .unwrap()
            .scale(3.0)
            .add_scaled(&HermitianMatrix::pauli('Y').unwrap(), 4.0);
        let e = eig_hermitian(&n).unwrap();
        assert!((e.eigenvalues[0] + 5.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvector_phase_convention() {
        let y = HermitianMatrix::pauli('Y').unwrap();
        let e = eig_hermitian(&y).unwrap();
        for v in &e.eigenvectors {
            let lead = v.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn eig_of_zero_matrix() {
        let e = eig_hermitian(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        assert_eq!(
            numerical_rank(&HermitianMatrix::zeros(3), DEFAULT_RANK_TOL).unwrap(),
            0
        );
    }

    #[test]
    fn ground_projector_examples() {
        let z = HermitianMatrix::pauli('Z').unwrap();
        let p = ground_projector(&z, DEFAULT_GAP_TOL).unwrap();
        assert!(p.matrix.max_abs_diff(&diag_c(&[0.0, 1.0])) < 1e-14);

        let id = HermitianMatrix::identity(5);
        let p = ground_projector(&id, DEFAULT_GAP_TOL).unwrap();
        assert_eq!(p.rank, 5);
        assert!(p.matrix.max_abs_diff(&id) < 1e-14);

        // 4P' - I with P' = {000, 111}; ground space is the other six states.
        let edge = Projector::from_basis_states(8, [0, 7]);
        let a = edge
            .matrix
            .scale(4.0)
            .add_scaled(&HermitianMatrix::identity(8), -1.0);
        let p = ground_projector(&a, DEFAULT_GAP_TOL).unwrap();
        assert!(p.matrix.max_abs_diff(&edge.complement().matrix) < 1e-14);
        assert_eq!(p.rank, 6);
    }

    #[test]
    fn support_projector_examples() {
        let rho = HermitianMatrix::identity(8).scale(0.125);
        assert_eq!(support_projector(&rho, DEFAULT_GAP_TOL).unwrap().rank, 8);
        let p000 = Projector::from_basis_states(8, [0]);
        let s = support_projector(&p000.matrix, DEFAULT_GAP_TOL).unwrap();
        assert!(s.matrix.max_abs_diff(&p000.matrix) < 1e-14);
        let neg = diag_c(&[1.0, -1e-3]);
        assert!(matches!(
            support_projector(&neg, DEFAULT_GAP_TOL),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn numerical_rank_examples() {
        assert_eq!(
            numerical_rank(&diag_c(&[2.0, 1.0, 1e-12]), DEFAULT_RANK_TOL).unwrap(),
            2
        );
    }

    #[test]
    fn nullspace_examples() {
        let ns = real_nullspace(&[], 3, DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(ns.dimension, 3);

        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let ns = real_nullspace(&rows, 3, DEFAULT_NULLSPACE_TOL).unwrap();
        assert_eq!(ns.dimension, 1);
        let b = &ns.basis[0];
        assert!(b[0].abs() < 1e-15 && b[1].abs() < 1e-15 && (b[2].abs() - 1.0).abs() < 1e-15);

        assert!(real_nullspace(&[vec![1.0]], 2, 1e-8).is_err());
    }

    #[test]
    fn projector_complement_and_from_matrix() {
        let p = Projector::from_basis_states(4, [1, 2]);
        let q = p.complement();
        assert_eq!(q.rank, 2);
        assert!(q.matrix.max_abs_diff(&diag_c(&[1.0, 0.0, 0.0, 1.0])) < 1e-14);
        let back = Projector::from_matrix(&q.matrix).unwrap();
        assert_eq!(back.rank, 2);
        assert!(Projector::from_matrix(&diag_c(&[0.5, 1.0])).is_err());
    }

    #[test]
    fn matrix_file_roundtrip() {
        let y = HermitianMatrix::pauli_word("YZ").unwrap();
        let back = HermitianMatrix::from_json(&y.to_json().unwrap()).unwrap();
        assert_eq!(back, y);
        assert!(HermitianMatrix::from_json(r#"{"dim":2,"re":[[1,0]],"im":[[0,0]]}"#).is_err());
    }
}
