//! Spaces of local Hamiltonians over N two-dimensional units.
//!
//! Units are numbered `1..=N`; unit 1 is the leftmost (most significant)
//! tensor factor, so the computational basis state `|x1 x2 ... xN>` sits at
//! index `x1 * 2^(N-1) + ... + xN`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{hs_inner, HermitianMatrix, C64};

pub const MAX_UNITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// Full 2x2 complex matrices, hermitian basis I, X, Y, Z.
    Qubit,
    /// Diagonal 2x2 matrices, hermitian basis I, Z.
    Bit,
    /// Real 2x2 matrices, hermitian basis I, X, Z.
    RealTwo,
}

impl AlgebraKind {
    /// Hermitian basis letters, identity first.
    pub fn letters(self) -> &'static [char] {
        match self {
            AlgebraKind::Qubit => &['I', 'X', 'Y', 'Z'],
            AlgebraKind::Bit => &['I', 'Z'],
            AlgebraKind::RealTwo => &['I', 'X', 'Z'],
        }
    }

    pub fn hermitian_dim(self) -> usize {
        self.letters().len()
    }

    pub fn unit_dim(self) -> usize {
        2
    }
}

/// A family of subsets of `{1..N}`, stored as bitmasks (bit `i-1` for unit `i`)
/// in canonical order: by cardinality, then lexicographically.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n_units: usize,
    members: Vec<u32>,
}

fn subset_elements(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

fn canonical_sort(members: &mut Vec<u32>) {
    members.sort_by(|a, b| {
        a.count_ones()
            .cmp(&b.count_ones())
            .then_with(|| subset_elements(*a).cmp(&subset_elements(*b)))
    });
    members.dedup();
}

impl Hypergraph {
    pub fn new(n_units: usize, subsets: &[Vec<usize>]) -> Result<Self> {
        if n_units > MAX_UNITS {
            return Err(Error::ParameterOutOfRange {
                name: "n_units",
                value: n_units as f64,
                range: "0..=8",
            });
        }
        let mut members = Vec::with_capacity(subsets.len());
        for s in subsets {
            let mut mask = 0u32;
            for &i in s {
                if i == 0 || i > n_units {
                    return Err(Error::InvalidSubset {
                        subset: s.clone(),
                        n_units,
                    });
                }
                mask |= 1 << (i - 1);
            }
            members.push(mask);
        }
        canonical_sort(&mut members);
        Ok(Self { n_units, members })
    }

    /// Parses a JSON list of lists of 1-based unit indices.
    pub fn from_json(n_units: usize, s: &str) -> Result<Self> {
        let subsets: Vec<Vec<usize>> = serde_json::from_str(s)?;
        Self::new(n_units, &subsets)
    }

    /// Cycle hypergraph c3 = {{}, {1}, {2}, {3}, {1,2}, {2,3}, {3,1}}.
    pub fn c3() -> Self {
        Self::new(3, &[vec![1, 2], vec![2, 3], vec![3, 1]])
            .unwrap()
            .closure()
    }

    /// Path hypergraph p3 = {{}, {1}, {2}, {3}, {1,2}, {2,3}}.
    pub fn p3() -> Self {
        Self::new(3, &[vec![1, 2], vec![2, 3]]).unwrap().closure()
    }

    /// All subsets of size at most `k` (the closure of "N choose k").
    pub fn n_choose_k(n_units: usize, k: usize) -> Result<Self> {
        let subsets: Vec<Vec<usize>> = (0u32..1 << n_units)
            .filter(|m| m.count_ones() as usize == k)
            .map(subset_elements)
            .collect();
        Ok(Self::new(n_units, &subsets)?.closure())
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, subset: &[usize]) -> bool {
        let mask = subset.iter().fold(0u32, |m, &i| m | 1 << (i - 1));
        self.members.contains(&mask)
    }

    pub fn member_lists(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|&m| subset_elements(m)).collect()
    }

    /// Adds every subset of every member. Idempotent.
    pub fn closure(&self) -> Self {
        let mut members = Vec::new();
        for &m in &self.members {
            // Enumerate all submasks of m, including 0 and m.
            let mut sub = m;
            loop {
                members.push(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        canonical_sort(&mut members);
        Self {
            n_units: self.n_units,
            members,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closure().members.len() == self.members.len()
    }

    /// Inclusion-maximal members (an antichain).
    pub fn generating_class(&self) -> Self {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| {
                !self
                    .members
                    .iter()
                    .any(|&other| other != m && other & m == m)
            })
            .collect();
        Self {
            n_units: self.n_units,
            members,
        }
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hypergraph(N={}, {:?})",
            self.n_units,
            self.member_lists()
        )
    }
}

/// Ordered HS-orthogonal basis of U(g, a): identity first, then the
/// nu-factor interactions for each member nu of g.
#[derive(Clone, Debug)]
pub struct LocalSpaceBasis {
    pub hypergraph: Hypergraph,
    pub algebras: Vec<AlgebraKind>,
    pub elements: Vec<HermitianMatrix>,
    pub labels: Vec<String>,
    pub d: usize,
}

/// Words `B_1 ... B_N` with `B_i != I` exactly on `support`.
fn words_on_support(algebras: &[AlgebraKind], support: u32) -> Vec<String> {
    let mut words = vec![String::new()];
    for (i, alg) in algebras.iter().enumerate() {
        let letters: Vec<char> = if support >> i & 1 == 1 {
            alg.letters()[1..].to_vec()
        } else {
            vec!['I']
        };
        words = words
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    words
}

pub fn space_dimension(g: &Hypergraph, algebras: &[AlgebraKind]) -> Result<usize> {
    if !g.is_closed() {
        return Err(Error::NotClosed);
    }
    check_algebras(g, algebras)?;
    Ok(g.members
        .iter()
        .map(|&m| {
            algebras
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, a)| a.hermitian_dim() - 1)
                .product::<usize>()
        })
        .sum())
}

fn check_algebras(g: &Hypergraph, algebras: &[AlgebraKind]) -> Result<()> {
    if algebras.len() != g.n_units {
        return Err(Error::DimensionMismatch {
            expected: g.n_units,
            found: algebras.len(),
        });
    }
    Ok(())
}

pub fn factor_interaction_basis(
    g: &Hypergraph,
    algebras: &[AlgebraKind],
) -> Result<LocalSpaceBasis> {
    if !g.is_closed() || g.is_empty() {
        return Err(Error::NotClosed);
    }
    check_algebras(g, algebras)?;
    let labels: Vec<String> = g
        .members
        .iter()
        .flat_map(|&m| words_on_support(algebras, m))
        .collect();
    let elements = labels
        .iter()
        .map(|w| HermitianMatrix::pauli_word(w))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalSpaceBasis {
        hypergraph: g.clone(),
        algebras: algebras.to_vec(),
        elements,
        labels,
        d: 1 << g.n_units,
    })
}

impl LocalSpaceBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n_units(&self) -> usize {
        self.hypergraph.n_units
    }

    /// Words of the full hermitian basis of the algebra that are not in U,
    /// i.e. an orthogonal basis of the complement of U in H(A).
    pub fn complement_labels(&self) -> Vec<String> {
        let n = self.n_units();
        (0u32..1 << n)
            .filter(|m| !self.hypergraph.members.contains(m))
            .flat_map(|m| words_on_support(&self.algebras, m))
            .collect()
    }

    pub fn complement_basis(&self) -> Vec<HermitianMatrix> {
        self.complement_labels()
            .iter()
            .map(|w| HermitianMatrix::pauli_word(w).expect("letters come from algebra kinds"))
            .collect()
    }

    /// Coefficients `<e_i, A> / <e_i, e_i>` of A in this basis.
    pub fn coefficients(&self, a: &HermitianMatrix) -> Result<Vec<f64>> {
        let norm = self.d as f64;
        self.elements
            .iter()
            .map(|e| Ok(hs_inner(e, a)? / norm))
            .collect()
    }

    pub fn from_coefficients(&self, coeffs: &[f64]) -> Result<HermitianMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        let mut out = HermitianMatrix::zeros(self.d);
        for (e, &c) in self.elements.iter().zip(coeffs) {
            if c != 0.0 {
                out = out.add_scaled(e, c);
            }
        }
        Ok(out)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Orthogonal projection of A onto U with respect to the HS inner product.
pub fn project_onto_space(a: &HermitianMatrix, basis: &LocalSpaceBasis) -> Result<HermitianMatrix> {
    if a.dim() != basis.d {
        return Err(Error::DimensionMismatch {
            expected: basis.d,
            found: a.dim(),
        });
    }
    basis.from_coefficients(&basis.coefficients(a)?)
}

fn units_of(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::Parse(format!(
            "dimension {dim} is not a power of two"
        )))
    }
}

fn keep_mask(keep: &[usize], n_units: usize) -> Result<u32> {
    let mut mask = 0u32;
    for &i in keep {
        if i == 0 || i > n_units {
            return Err(Error::InvalidSubset {
                subset: keep.to_vec(),
                n_units,
            });
        }
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

/// Splits a full index into (kept index, traced index), preserving unit order.
fn split_index(x: usize, keep: u32, n_units: usize) -> (usize, usize) {
    let (mut kept, mut traced) = (0usize, 0usize);
    for unit in 0..n_units {
        let bit = x >> (n_units - 1 - unit) & 1;
        if keep >> unit & 1 == 1 {
            kept = kept << 1 | bit;
        } else {
            traced = traced << 1 | bit;
        }
    }
    (kept, traced)
}

/// Tr over the units not in `keep` (1-based unit indices).
pub fn partial_trace(a: &HermitianMatrix, keep: &[usize]) -> Result<HermitianMatrix> {
    let n = units_of(a.dim())?;
    let mask = keep_mask(keep, n)?;
    let k = mask.count_ones() as usize;
    let dk = 1usize << k;
    let d = a.dim();
    let split: Vec<(usize, usize)> = (0..d).map(|x| split_index(x, mask, n)).collect();
    let mut out = vec![C64::new(0.0, 0.0); dk * dk];
    for x in 0..d {
        let (kx, tx) = split[x];
        for y in 0..d {
            let (ky, ty) = split[y];
            if tx == ty {
                out[kx * dk + ky] += a.get(x, y);
            }
        }
    }
    HermitianMatrix::new(dk, out)
}

/// B tensor I on the complement of `keep`, as a matrix on all `n_units`.
pub fn embed(b: &HermitianMatrix, keep: &[usize], n_units: usize) -> Result<HermitianMatrix> {
    let mask = keep_mask(keep, n_units)?;
    let k = mask.count_ones() as usize;
    if b.dim() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            found: b.dim(),
        });
    }
    let d = 1usize << n_units;
    let split: Vec<(usize, usize)> = (0..d).map(|x| split_index(x, mask, n_units)).collect();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for x in 0..d {
        for y in 0..d {
            if split[x].1 == split[y].1 {
                out[x * d + y] = b.get(split[x].0, split[y].0);
            }
        }
    }
    Ok(HermitianMatrix::from_raw_unchecked(d, out))
}

/// Marginals of A on the generating class of g, in canonical order.
pub fn marginal_map(
    a: &HermitianMatrix,
    g: &Hypergraph,
) -> Result<Vec<(Vec<usize>, HermitianMatrix)>> {
    let n = units_of(a.dim())?;
    if n != g.n_units {
        return Err(Error::DimensionMismatch {
            expected: 1 << g.n_units,
            found: a.dim(),
        });
    }
    g.generating_class()
        .member_lists()
        .into_iter()
        .map(|nu| {
            let m = partial_trace(a, &nu)?;
            Ok((nu, m))
        })
        .collect()
}

/// Named models accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    C3Qubit,
    P3Qubit,
    C3Bit,
    P3Bit,
    C3RealTwo,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::C3Qubit,
        Model::P3Qubit,
        Model::C3Bit,
        Model::P3Bit,
        Model::C3RealTwo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::C3Qubit => "c3-qubit",
            Model::P3Qubit => "p3-qubit",
            Model::C3Bit => "c3-bit",
            Model::P3Bit => "p3-bit",
            Model::C3RealTwo => "c3-realtwo",
        }
    }

    pub fn hypergraph(self) -> Hypergraph {
        match self {
            Model::C3Qubit | Model::C3Bit | Model::C3RealTwo => Hypergraph::c3(),
            Model::P3Qubit | Model::P3Bit => Hypergraph::p3(),
        }
    }

    pub fn algebra(self) -> AlgebraKind {
        match self {
            Model::C3Qubit | Model::P3Qubit => AlgebraKind::Qubit,
            Model::C3Bit | Model::P3Bit => AlgebraKind::Bit,
            Model::C3RealTwo => AlgebraKind::RealTwo,
        }
    }

    pub fn basis(self) -> LocalSpaceBasis {
        factor_interaction_basis(&self.hypergraph(), &[self.algebra(); 3])
            .expect("built-in models are closed hypergraphs over three units")
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown model '{s}' (expected one of c3-qubit, p3-qubit, c3-bit, p3-bit, c3-realtwo)"
                ))
            })
    }
}
