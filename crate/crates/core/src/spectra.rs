//! Spectrahedra `S = {x : I + sum_i x_i A_i >= 0}` over traceless bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, hs_inner, HermitianMatrix, MatrixFile, C64};
use crate::local_space::LocalSpaceBasis;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-7;

/// Nonzero entries `(row, col, value)` of a small matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseMatrix {
    pub fn from_dense(a: &HermitianMatrix) -> Self {
        let d = a.dim();
        let mut entries = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let v = a.get(i, j);
                if v != C64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Interior,
    Boundary,
    Outside,
}

#[derive(Clone, Debug)]
pub struct LmiSpectrahedron {
    d: usize,
    basis: Vec<HermitianMatrix>,
    sparse: Vec<SparseMatrix>,
    norms: Vec<f64>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SpectrahedronFile {
    d: usize,
    m: usize,
    basis: Vec<MatrixFile>,
}

impl LmiSpectrahedron {
    /// Builds the spectrahedron from traceless, pairwise HS-orthogonal
    /// hermitian matrices of a common dimension.
    pub fn new(d: usize, basis: Vec<HermitianMatrix>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: labels.len(),
            });
        }
        for a in &basis {
            if a.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: a.dim(),
                });
            }
            if a.trace().abs() > 1e-12 {
                return Err(Error::Parse(format!(
                    "basis matrix has trace {} but must be traceless",
                    a.trace()
                )));
            }
        }
        let norms: Vec<f64> = basis
            .iter()
            .map(|a| hs_inner(a, a))
            .collect::<Result<_>>()?;
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                let ip = hs_inner(a, b)?;
                if ip.abs() > 1e-10 * norms[i].max(1.0) {
                    return Err(Error::Parse(format!(
                        "basis is not HS-orthogonal (inner product {ip:e})"
                    )));
                }
            }
            if norms[i] == 0.0 {
                return Err(Error::Parse("basis contains the zero matrix".into()));
            }
        }
        let sparse = basis.iter().map(SparseMatrix::from_dense).collect();
        Ok(Self {
            d,
            basis,
            sparse,
            norms,
            labels,
        })
    }

    /// Drops the identity (element 0) of a local-space basis.
    pub fn from_local_space(basis: &LocalSpaceBasis) -> Result<Self> {
        let first = basis.elements.first().ok_or(Error::EmptySpectrahedron)?;
        if first.max_abs_diff(&HermitianMatrix::identity(basis.d)) > 0.0 {
            return Err(Error::Parse(
                "local-space basis must start with the identity".into(),
            ));
        }
        Self::new(
            basis.d,
            basis.elements[1..].to_vec(),
            basis.labels[1..].to_vec(),
        )
    }

    /// The 3x3 spectrahedron [[1,x,y],[x,1,z],[y,z,1]] >= 0 bounded by the
    /// Cayley cubic.
    pub fn cayley_cubic() -> Self {
        let slot = |i: usize, j: usize| {
            let mut data = [0.0; 9];
            data[i * 3 + j] = 1.0;
            data[j * 3 + i] = 1.0;
            HermitianMatrix::from_real(3, &data).unwrap()
        };
        Self::new(
            3,
            vec![slot(0, 1), slot(0, 2), slot(1, 2)],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .expect("cayley basis is traceless and orthogonal")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        &self.basis
    }

    pub fn sparse_basis(&self) -> &[SparseMatrix] {
        &self.sparse
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `<A_i, A_i>` for each basis element.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `sum_i x_i A_i` (without the identity).
    pub fn linear_part(&self, x: &[f64]) -> Result<HermitianMatrix> {
        self.check_len(x)?;
        let d = self.d;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for (sp, &xi) in self.sparse.iter().zip(x) {
            for &(r, c, v) in &sp.entries {
                data[r * d + c] += v * xi;
            }
        }
        HermitianMatrix::new(d, data)
    }

    /// `I + sum_i x_i A_i`.
    pub fn assemble(&self, x: &[f64]) -> Result<HermitianMatrix> {
        Ok(&self.linear_part(x)? + &HermitianMatrix::identity(self.d))
    }

    /// Coordinates `<A_i, A> / <A_i, A_i>`; the identity component of A is
    /// ignored since every `A_i` is traceless.
    pub fn coordinates(&self, a: &HermitianMatrix) -> Result<Vec<f64>> {
        self.basis
            .iter()
            .zip(&self.norms)
            .map(|(b, n)| Ok(hs_inner(b, a)? / n))
            .collect()
    }

    pub fn min_eigenvalue(&self, x: &[f64]) -> Result<f64> {
        Ok(eig_hermitian(&self.assemble(x)?)?.min())
    }

    pub fn classify_point(&self, x: &[f64], tol: f64) -> Result<PointClass> {
        let l = self.min_eigenvalue(x)?;
        Ok(if l > tol {
            PointClass::Interior
        } else if l >= -tol {
            PointClass::Boundary
        } else {
            PointClass::Outside
        })
    }

    /// `1 + <A, pi_V(rho)>` for `A = sum_i x_i A_i`, where `pi_V` is the
    /// orthogonal projection onto the span of the basis. Nonnegative for all
    /// feasible x and states rho.
    pub fn duality_residual(&self, x: &[f64], rho: &HermitianMatrix) -> Result<f64> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: rho.dim(),
            });
        }
        let l = self.min_eigenvalue(x)?;
        if l < -DEFAULT_BOUNDARY_TOL {
            return Err(Error::Infeasible(l));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::Parse(format!("state has trace {tr}, expected 1")));
        }
        let rl = eig_hermitian(rho)?.min();
        if rl < -1e-8 {
            return Err(Error::NotPositive(rl));
        }
        let mut s = 1.0;
        for (a, &xi) in self.basis.iter().zip(x) {
            s += xi * hs_inner(a, rho)?;
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SpectrahedronFile {
            d: self.d,
            m: self.m(),
            basis: self.basis.iter().map(|a| a.to_file()).collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SpectrahedronFile = serde_json::from_str(s)?;
        if file.basis.len() != file.m {
            return Err(Error::DimensionMismatch {
                expected: file.m,
                found: file.basis.len(),
            });
        }
        let basis = file
            .basis
            .iter()
            .map(HermitianMatrix::from_file)
            .collect::<Result<Vec<_>>>()?;
        let labels = (1..=file.m).map(|i| format!("A{i}")).collect();
        Self::new(file.d, basis, labels)
    }
}
