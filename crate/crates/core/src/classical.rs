//! Commutative case: support sets of bit configurations, the marginal
//! indicator matrix M, M-feasibility, frustration-free decompositions and the
//! three-bit coatom enumerations.
//!
//! Configuration `x = x_1 x_2 ... x_N` is the integer with `x_1` as most
//! significant digit, i.e. the diagonal position of `|x><x|`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{HermitianMatrix, Projector};
use crate::local_space::Hypergraph;

const MAX_CLASSICAL_UNITS: usize = 6;

/// Digit `i` (1-based, unit order) of configuration `x` over `n` units.
pub fn digit(x: usize, i: usize, n: usize) -> usize {
    x >> (n - i) & 1
}

/// Truncation `x_nu` as an integer over the units of `nu` (ascending order).
pub fn truncate(x: usize, nu: &[usize], n: usize) -> usize {
    nu.iter().fold(0, |acc, &i| acc << 1 | digit(x, i, n))
}

pub fn config_label(x: usize, n: usize) -> String {
    (1..=n)
        .map(|i| if digit(x, i, n) == 1 { '1' } else { '0' })
        .collect()
}

/// A subset F of `{0,1}^N`: bit x of `mask` is set iff configuration x is in F.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    n_units: usize,
    mask: u64,
}

impl SupportSet {
    pub fn new(n_units: usize, mask: u64) -> Result<Self> {
        if n_units == 0 || n_units > MAX_CLASSICAL_UNITS {
            return Err(Error::ParameterOutOfRange {
                name: "n_units",
                value: n_units as f64,
                range: "1..=6",
            });
        }
        let size = 1usize << n_units;
        if size < 64 && mask >> size != 0 {
            return Err(Error::Parse(format!(
                "mask {mask:#x} has bits beyond the {size} configurations"
            )));
        }
        Ok(Self { n_units, mask })
    }

    pub fn from_configs(n_units: usize, configs: &[usize]) -> Result<Self> {
        let size = 1usize << n_units.min(MAX_CLASSICAL_UNITS);
        let mut mask = 0u64;
        for &x in configs {
            if x >= size {
                return Err(Error::Parse(format!("configuration {x} out of range")));
            }
            mask |= 1 << x;
        }
        Self::new(n_units, mask)
    }

    pub fn full(n_units: usize) -> Self {
        let size = 1usize << n_units;
        let mask = if size == 64 {
            u64::MAX
        } else {
            (1u64 << size) - 1
        };
        Self { n_units, mask }
    }

    pub fn empty(n_units: usize) -> Self {
        Self { n_units, mask: 0 }
    }

    /// Parses either a `2^N`-character 0/1 string, read left to right as
    /// configurations `00..0, 00..1, ...`, or a comma-separated list of
    /// binary configuration labels such as `000,001`.
    pub fn parse(n_units: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let size = 1usize << n_units;
        if s.contains(',') || (s.len() == n_units && size != n_units) {
            let configs = s
                .split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    if tok.len() != n_units {
                        return Err(Error::Parse(format!(
                            "configuration '{tok}' must have {n_units} binary digits"
                        )));
                    }
                    usize::from_str_radix(tok, 2)
                        .map_err(|_| Error::Parse(format!("bad configuration '{tok}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::from_configs(n_units, &configs);
        }
        if s.len() != size || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Parse(format!(
                "support mask '{s}' must be {size} characters of 0/1 or a list of configurations"
            )));
        }
        let configs: Vec<usize> = s
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == '1')
            .map(|(i, _)| i)
            .collect();
        Self::from_configs(n_units, &configs)
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn size(&self) -> usize {
        1 << self.n_units
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask >> x & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn complement(&self) -> Self {
        Self {
            n_units: self.n_units,
            mask: Self::full(self.n_units).mask & !self.mask,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            n_units: self.n_units,
            mask: self.mask | other.mask,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            n_units: self.n_units,
            mask: self.mask & other.mask,
        }
    }

    pub fn configs(&self) -> Vec<usize> {
        (0..self.size()).filter(|&x| self.contains(x)).collect()
    }

    /// 0/1 pattern of the diagonal projector, top-left first.
    pub fn diag(&self) -> Vec<u8> {
        (0..self.size()).map(|x| self.contains(x) as u8).collect()
    }

    pub fn to_projector(&self) -> Projector {
        Projector::from_basis_states(self.size(), self.configs())
    }

    /// Support of a diagonal 0/1 projector.
    pub fn from_projector(p: &Projector) -> Result<Self> {
        let d = p.dim();
        if !d.is_power_of_two() || !p.matrix.is_diagonal(1e-10) {
            return Err(Error::Parse("projector is not diagonal".into()));
        }
        let configs: Vec<usize> = p
            .matrix
            .diag()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.5)
            .map(|(i, _)| i)
            .collect();
        Self::from_configs(d.trailing_zeros() as usize, &configs)
    }

    /// `{000,001}` style label.
    pub fn label(&self) -> String {
        let items: Vec<String> = self
            .configs()
            .iter()
            .map(|&x| config_label(x, self.n_units))
            .collect();
        format!("{{{}}}", items.join(","))
    }
}

impl fmt::Debug for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupportSet{}", self.label())
    }
}

/// Marginal indicator matrix: entry `((nu, y), x) = 1` iff `x_nu = y`.
#[derive(Clone, Debug)]
pub struct MMatrix {
    pub n_units: usize,
    pub rows: Vec<(Vec<usize>, usize)>,
    pub entries: Vec<Vec<u8>>,
}

impl MMatrix {
    pub fn n_cols(&self) -> usize {
        1 << self.n_units
    }

    pub fn column(&self, x: usize) -> Vec<u8> {
        self.entries.iter().map(|row| row[x]).collect()
    }

    fn column_support(&self, x: usize) -> Vec<bool> {
        self.entries.iter().map(|row| row[x] == 1).collect()
    }
}

fn m_matrix_over(members: &[Vec<usize>], n: usize) -> MMatrix {
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for nu in members {
        for y in 0..1usize << nu.len() {
            rows.push((nu.clone(), y));
            entries.push(
                (0..1usize << n)
                    .map(|x| (truncate(x, nu, n) == y) as u8)
                    .collect(),
            );
        }
    }
    MMatrix {
        n_units: n,
        rows,
        entries,
    }
}

/// M with rows over the generating class of g.
pub fn m_matrix(g: &Hypergraph) -> MMatrix {
    m_matrix_over(&g.generating_class().member_lists(), g.n_units())
}

/// M with rows over every member of g (including the empty set).
pub fn m_matrix_full(g: &Hypergraph) -> MMatrix {
    m_matrix_over(&g.member_lists(), g.n_units())
}

fn check_units(f: &SupportSet, n: usize) -> Result<()> {
    if f.n_units != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.n_units,
        });
    }
    Ok(())
}

/// F is M-feasible iff no configuration outside F has its row support covered
/// by the union of the row supports of F.
pub fn is_m_feasible_with(f: &SupportSet, m: &MMatrix) -> Result<bool> {
    check_units(f, m.n_units)?;
    let mut covered = vec![false; m.rows.len()];
    for y in f.configs() {
        for (c, s) in covered.iter_mut().zip(m.column_support(y)) {
            *c |= s;
        }
    }
    Ok(f.complement().configs().into_iter().all(|x| {
        m.column_support(x)
            .iter()
            .zip(&covered)
            .any(|(&sx, &c)| sx && !c)
    }))
}

pub fn is_m_feasible(f: &SupportSet, g: &Hypergraph) -> Result<bool> {
    is_m_feasible_with(f, &m_matrix(g))
}

/// One cylinder factor `P_nu I_nu-bar` of a frustration-free decomposition:
/// `P_nu` keeps every configuration of the units in `nu` except `excluded`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderFactor {
    pub nu: Vec<usize>,
    pub excluded: Vec<usize>,
    pub support: SupportSet,
}

impl CylinderFactor {
    pub fn describe(&self) -> String {
        let ex: Vec<String> = self
            .excluded
            .iter()
            .map(|&y| config_label(y, self.nu.len()))
            .collect();
        let units: Vec<String> = self.nu.iter().map(|i| i.to_string()).collect();
        format!("{{{}}}' on units {{{}}}", ex.join(","), units.join(","))
    }
}

/// Writes F as the intersection of cylinders `{x_nu}' I_nu-bar` over
/// `x` outside F and `nu` in `g_x = {nu in g : x_nu != y_nu for all y in F}`.
/// Returns `None` when that intersection is strictly larger than F.
pub fn ff_ground_projector_form(
    f: &SupportSet,
    g: &Hypergraph,
) -> Result<Option<Vec<CylinderFactor>>> {
    let n = g.n_units();
    check_units(f, n)?;
    let members = g.member_lists();
    let inside = f.configs();
    let mut excluded: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for x in f.complement().configs() {
        for nu in &members {
            let xn = truncate(x, nu, n);
            if inside.iter().all(|&y| truncate(y, nu, n) != xn) {
                let e = excluded.entry(nu.clone()).or_default();
                if !e.contains(&xn) {
                    e.push(xn);
                }
            }
        }
    }
    let mut factors = Vec::new();
    let mut meet = SupportSet::full(n);
    for (nu, mut ex) in excluded {
        ex.sort_unstable();
        let keep: Vec<usize> = (0..1usize << n)
            .filter(|&z| !ex.contains(&truncate(z, &nu, n)))
            .collect();
        let support = SupportSet::from_configs(n, &keep)?;
        meet = meet.intersection(&support);
        factors.push(CylinderFactor {
            nu,
            excluded: ex,
            support,
        });
    }
    Ok((meet == *f).then_some(factors))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalModel {
    /// Two-local three-bit Hamiltonians (cycle c3).
    C3,
    /// Frustration-free two-local three-bit Hamiltonians.
    C3ff,
    /// Path p3.
    P3,
}

impl ClassicalModel {
    pub const ALL: [ClassicalModel; 3] =
        [ClassicalModel::C3, ClassicalModel::C3ff, ClassicalModel::P3];

    pub fn name(self) -> &'static str {
        match self {
            ClassicalModel::C3 => "c3",
            ClassicalModel::C3ff => "c3ff",
            ClassicalModel::P3 => "p3",
        }
    }

    /// Whether `{x, y}` is an allowed edge (its complement is a coatom).
    pub fn edge(self, x: usize, y: usize) -> bool {
        let diff = x ^ y;
        match self {
            ClassicalModel::C3 => (x.count_ones() + y.count_ones()) % 2 == 1,
            ClassicalModel::C3ff => diff.count_ones() == 1,
            ClassicalModel::P3 => diff == 0b100 || diff == 0b001,
        }
    }
}

impl std::str::FromStr for ClassicalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown classical model '{s}' (c3, c3ff, p3)")))
    }
}

/// Digit sums of x and y differ modulo two.
pub fn k44_edge(x: usize, y: usize) -> Result<bool> {
    if x == y {
        return Err(Error::Parse(format!(
            "k44_edge needs distinct vertices, got {x} twice"
        )));
    }
    if x > 7 || y > 7 {
        return Err(Error::Parse(
            "k44_edge takes three-bit configurations".into(),
        ));
    }
    Ok((x.count_ones() + y.count_ones()) % 2 == 1)
}

/// All 28 two-element subsets of `{0,1}^3` in table order: by the digits in
/// which the two configurations differ, then by the smaller configuration.
pub fn three_bit_pairs() -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..8)
        .flat_map(|x| (x + 1..8).map(move |y| (x, y)))
        .collect();
    pairs.sort_by_key(|&(x, y)| (x ^ y, x));
    pairs
}

/// Complements of the allowed edges, i.e. the coatoms, in table order.
pub fn enumerate_coatoms(model: ClassicalModel) -> Vec<SupportSet> {
    three_bit_pairs()
        .into_iter()
        .filter(|&(x, y)| model.edge(x, y))
        .map(|(x, y)| {
            SupportSet::from_configs(3, &[x, y])
                .expect("three-bit configurations")
                .complement()
        })
        .collect()
}

/// F lies in the lattice iff its complement is a union of allowed edges.
pub fn lattice_membership(f: &SupportSet, model: ClassicalModel) -> Result<bool> {
    check_units(f, 3)?;
    let out = f.complement().configs();
    Ok(out
        .iter()
        .all(|&x| out.iter().any(|&y| y != x && model.edge(x, y))))
}

/// One row of Tables 1-2 style output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub label: String,
    pub diag: String,
    pub expansion: String,
    pub coatom: SupportSet,
}

impl EdgeRow {
    pub fn line(&self) -> String {
        format!("{} = {} = {}", self.label, self.diag, self.expansion)
    }
}

fn signed_factor(bit: usize) -> &'static str {
    if bit == 0 {
        "(I+Z)"
    } else {
        "(I-Z)"
    }
}

/// Pauli Z-word expansion of a diagonal 0/1 matrix `|x><x| + |y><y|`.
pub fn z_expansion(x: usize, y: usize) -> String {
    let n = 3;
    let diff = x ^ y;
    if diff.count_ones() == 1 {
        let factors: String = (1..=n)
            .map(|i| {
                if digit(diff, i, n) == 1 {
                    "I"
                } else {
                    signed_factor(digit(x, i, n))
                }
            })
            .collect();
        return format!("1/4{factors}");
    }
    // General case: coefficient of each Z-word is <w, P'>/8.
    let mut terms = Vec::new();
    for word in 0..1usize << n {
        let value = |z: usize| -> i32 {
            if (word & z).count_ones() % 2 == 0 {
                1
            } else {
                -1
            }
        };
        let coeff = value(x) + value(y);
        if coeff == 0 {
            continue;
        }
        let letters: String = (1..=n)
            .map(|i| if digit(word, i, n) == 1 { 'Z' } else { 'I' })
            .collect();
        terms.push((coeff, letters));
    }
    let denom = 8 / 2;
    let mut s = String::new();
    for (k, (c, w)) in terms.iter().enumerate() {
        let sign = if *c < 0 {
            "-"
        } else if k > 0 {
            "+"
        } else {
            ""
        };
        s.push_str(sign);
        s.push_str(w);
    }
    format!("1/{denom}({s})")
}

/// The configuration with fewer ones comes first, as in the paper's tables.
fn display_order(x: usize, y: usize) -> (usize, usize) {
    if (y.count_ones(), y) < (x.count_ones(), x) {
        (y, x)
    } else {
        (x, y)
    }
}

pub fn edge_table(model: ClassicalModel) -> Vec<EdgeRow> {
    three_bit_pairs()
        .into_iter()
        .filter(|&(x, y)| model.edge(x, y))
        .map(|(x, y)| {
            let (a, b) = display_order(x, y);
            let edge = SupportSet::from_configs(3, &[x, y]).expect("three-bit configurations");
            let diag: Vec<String> = edge.diag().iter().map(|v| v.to_string()).collect();
            EdgeRow {
                label: format!("{{{},{}}}", config_label(a, 3), config_label(b, 3)),
                diag: format!("diag({})", diag.join(",")),
                expansion: z_expansion(x, y),
                coatom: edge.complement(),
            }
        })
        .collect()
}

/// Diagonal Hamiltonian `sum_e |e|` over allowed edges inside F' (zero on F).
pub fn covering_hamiltonian(f: &SupportSet, model: ClassicalModel) -> HermitianMatrix {
    let out = f.complement().configs();
    let mut diag = vec![0.0; f.size()];
    for (i, &x) in out.iter().enumerate() {
        for &y in &out[i + 1..] {
            if model.edge(x, y) {
                diag[x] += 1.0;
                diag[y] += 1.0;
            }
        }
    }
    HermitianMatrix::diagonal(&diag)
}
