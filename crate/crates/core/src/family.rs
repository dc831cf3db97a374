//! The two-parameter family M(a,t) of rank-three two-local three-qubit
//! matrices whose kernels are rank-five coatoms.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{
    eig_hermitian, ground_projector, kernel_projector_from_eig, rank_from_eig, HermitianMatrix,
    C64, DEFAULT_NULLSPACE_TOL, DEFAULT_RANK_TOL,
};
use crate::local_space::Model;
use crate::search::{coatom_certificate, CoatomCertificate, Verdict};
use crate::spectra::{LmiSpectrahedron, PointClass, DEFAULT_BOUNDARY_TOL};

const SPECIAL_TOL: f64 = 1e-12;

pub const DEFAULT_A_GRID: [f64; 5] = [0.2, 0.6, 1.0, 1.4, 1.8];
pub const DEFAULT_T_GRID: [f64; 5] = [
    FRAC_PI_8,
    FRAC_PI_4,
    3.0 * FRAC_PI_8,
    5.0 * FRAC_PI_8,
    3.0 * FRAC_PI_4,
];

#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub a: f64,
    pub t: f64,
    pub eta: f64,
    pub dense: HermitianMatrix,
    /// Coefficients in the qubit c3 basis (identity first).
    pub pauli_coords: Vec<f64>,
}

fn check_params(a: f64, t: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&a) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            value: a,
            range: "[0, 2]",
        });
    }
    if !(0.0..PI).contains(&t) {
        return Err(Error::ParameterOutOfRange {
            name: "t",
            value: t,
            range: "[0, pi)",
        });
    }
    Ok(())
}

fn dense_form(a: f64, t: f64) -> HermitianMatrix {
    let eta = 4.0 - a * a;
    let (s, c) = t.sin_cos();
    let r = eta.sqrt() * (2.0 * t).sin();
    let mut m = vec![0.0; 64];
    m[0] = a * a;
    m[2 * 8 + 2] = 4.0 * c * c;
    m[2 * 8 + 3] = -r;
    m[3 * 8 + 2] = -r;
    m[3 * 8 + 3] = eta * s * s;
    m[4 * 8 + 4] = 4.0 * s * s;
    m[4 * 8 + 5] = r;
    m[5 * 8 + 4] = r;
    m[5 * 8 + 5] = eta * c * c;
    HermitianMatrix::from_real(8, &m).expect("symmetric by construction")
}

fn pauli_form(a: f64, t: f64) -> HermitianMatrix {
    let eta = 4.0 - a * a;
    let (s, c) = t.sin_cos();
    let w = |word: &str| HermitianMatrix::pauli_word(word).expect("valid word");
    let terms = [
        ("III", 1.0),
        ("IIZ", a * a / 4.0),
        ("IZI", a * a / 4.0 * s * s),
        ("ZII", a * a / 4.0 * c * c),
        ("IZX", eta.sqrt() / 2.0 * (2.0 * t).sin()),
        ("ZIX", -eta.sqrt() / 2.0 * (2.0 * t).sin()),
        ("IZZ", a * a / 8.0 - (8.0 - a * a) / 8.0 * (2.0 * t).cos()),
        ("ZIZ", a * a / 8.0 + (8.0 - a * a) / 8.0 * (2.0 * t).cos()),
        ("ZZI", -eta / 4.0),
    ];
    terms
        .iter()
        .fold(HermitianMatrix::zeros(8), |acc, (word, coeff)| {
            acc.add_scaled(&w(word), *coeff)
        })
}

/// Builds M(a,t) from its block form and checks it against the Pauli form.
pub fn m_family(a: f64, t: f64) -> Result<FamilyPoint> {
    check_params(a, t)?;
    let dense = dense_form(a, t);
    let pauli = pauli_form(a, t);
    let diff = dense.max_abs_diff(&pauli);
    assert!(
        diff < 1e-10,
        "block and Pauli forms of M({a}, {t}) differ by {diff:e}"
    );
    let pauli_coords = Model::C3Qubit.basis().coefficients(&dense)?;
    Ok(FamilyPoint {
        a,
        t,
        eta: 4.0 - a * a,
        dense,
        pauli_coords,
    })
}

pub fn is_special(a: f64, t: f64) -> bool {
    a < SPECIAL_TOL
        || (a - 2.0).abs() < SPECIAL_TOL
        || t < SPECIAL_TOL
        || (t - FRAC_PI_2).abs() < SPECIAL_TOL
}

fn basis_state(i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn two_term(i: usize, x: f64, j: usize, y: f64) -> Vec<C64> {
    let n = x.hypot(y);
    let mut v = vec![C64::new(0.0, 0.0); 8];
    v[i] = C64::new(x / n, 0.0);
    v[j] = C64::new(y / n, 0.0);
    v
}

/// Normalized kernel vectors |001>, |110>, |111>, psi_1, psi_2.
pub fn family_kernel_basis(a: f64, t: f64) -> Result<Vec<Vec<C64>>> {
    check_params(a, t)?;
    if is_special(a, t) {
        return Err(Error::SpecialParameter(
            "kernel basis needs a not in {0, 2} and t not in {0, pi/2}",
        ));
    }
    let eta = 4.0 - a * a;
    let r = eta.sqrt() * (2.0 * t).sin();
    let (s, c) = t.sin_cos();
    Ok(vec![
        basis_state(0b001),
        basis_state(0b110),
        basis_state(0b111),
        two_term(0b010, r, 0b011, 4.0 * c * c),
        two_term(0b100, r, 0b101, -4.0 * s * s),
    ])
}

#[derive(Clone, Debug)]
pub struct FamilyCertificate {
    pub a: f64,
    pub t: f64,
    pub rank: usize,
    pub projector_rank: usize,
    pub certificate: CoatomCertificate,
    /// `|cos|` of the angle between the certificate generator and M(a,t) in
    /// basis coordinates; `None` unless the certificate is a line.
    pub collinearity: Option<f64>,
}

impl FamilyCertificate {
    pub fn is_collinear(&self) -> bool {
        self.collinearity.is_some_and(|c| (1.0 - c).abs() < 1e-8)
    }
}

fn certify_point(a: f64, t: f64) -> Result<FamilyCertificate> {
    let point = m_family(a, t)?;
    let eig = eig_hermitian(&point.dense)?;
    let rank = rank_from_eig(&eig, DEFAULT_RANK_TOL);
    let p = kernel_projector_from_eig(&eig, DEFAULT_RANK_TOL);
    let basis = Model::C3Qubit.basis();
    let certificate = coatom_certificate(&p, &basis, DEFAULT_NULLSPACE_TOL)?;
    let collinearity = (certificate.dimension == 1).then(|| {
        let g = &certificate.coordinates[0];
        let m = &point.pauli_coords;
        let dot: f64 = g.iter().zip(m).map(|(x, y)| x * y).sum();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (dot / (norm(g) * norm(m))).abs()
    });
    Ok(FamilyCertificate {
        a,
        t,
        rank,
        projector_rank: p.rank,
        certificate,
        collinearity,
    })
}

/// Certificates over the grid, ordered by (a, t).
pub fn certify_family(a_grid: &[f64], t_grid: &[f64]) -> Result<Vec<FamilyCertificate>> {
    let points: Vec<(f64, f64)> = a_grid
        .iter()
        .flat_map(|&a| t_grid.iter().map(move |&t| (a, t)))
        .collect();
    points
        .par_iter()
        .map(|&(a, t)| certify_point(a, t))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// a = 0, any t.
    AZero,
    /// a = 2, any t.
    ATwo,
    /// t = 0, any a.
    TZero,
    /// t = pi/2, any a.
    THalfPi,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::AZero => "a=0",
            Regime::ATwo => "a=2",
            Regime::TZero => "t=0",
            Regime::THalfPi => "t=pi/2",
        }
    }

    /// The paper's claim for when M(a,t) - III is an extreme point.
    pub fn expected_extreme(self, a: f64, t: f64) -> bool {
        let a_end = a < SPECIAL_TOL || (a - 2.0).abs() < SPECIAL_TOL;
        let t_end = t < SPECIAL_TOL || (t - FRAC_PI_2).abs() < SPECIAL_TOL;
        match self {
            Regime::AZero => true,
            Regime::ATwo => t_end,
            Regime::TZero | Regime::THalfPi => a_end,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecialValueRow {
    pub regime: Regime,
    pub a: f64,
    pub t: f64,
    pub rank: usize,
    pub projector_rank: usize,
    pub certificate_dim: usize,
    pub point_class: PointClass,
    pub extreme: bool,
    pub expected_extreme: bool,
    /// Distance between the kernel projector and the ground projector of
    /// M(a,t) - III.
    pub ground_projector_distance: f64,
}

impl SpecialValueRow {
    pub fn agrees(&self) -> bool {
        self.extreme == self.expected_extreme
    }
}

fn special_row(regime: Regime, a: f64, t: f64, s: &LmiSpectrahedron) -> Result<SpecialValueRow> {
    let point = m_family(a, t)?;
    let eig = eig_hermitian(&point.dense)?;
    let rank = rank_from_eig(&eig, DEFAULT_RANK_TOL);
    let p = kernel_projector_from_eig(&eig, DEFAULT_RANK_TOL);
    let cert = coatom_certificate(&p, &Model::C3Qubit.basis(), DEFAULT_NULLSPACE_TOL)?;
    let shifted = point.dense.add_scaled(&HermitianMatrix::identity(8), -1.0);
    let x = s.coordinates(&shifted)?;
    let point_class = s.classify_point(&x, DEFAULT_BOUNDARY_TOL)?;
    let ground = ground_projector(&point.dense, 1e-8)?;
    // A boundary point is extreme iff its face, of dimension
    // dim(H(P'AP') n U) - 1, is a single point.
    let extreme = point_class == PointClass::Boundary && cert.dimension == 1;
    Ok(SpecialValueRow {
        regime,
        a,
        t,
        rank,
        projector_rank: p.rank,
        certificate_dim: cert.dimension,
        point_class,
        extreme,
        expected_extreme: regime.expected_extreme(a, t),
        ground_projector_distance: ground.distance(&p),
    })
}

/// Rank and extremality of M(a,t) - III along the four special lines.
pub fn special_values_report() -> Result<Vec<SpecialValueRow>> {
    let s = LmiSpectrahedron::from_local_space(&Model::C3Qubit.basis())?;
    let ts = [0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    let as_ = [0.0, 0.5, 1.0, 1.5, 2.0];
    let mut cases = Vec::new();
    for &t in &ts {
        cases.push((Regime::AZero, 0.0, t));
    }
    for &t in &ts {
        cases.push((Regime::ATwo, 2.0, t));
    }
    for &a in &as_ {
        cases.push((Regime::TZero, a, 0.0));
    }
    for &a in &as_ {
        cases.push((Regime::THalfPi, a, FRAC_PI_2));
    }
    cases
        .into_iter()
        .map(|(r, a, t)| special_row(r, a, t, &s))
        .collect()
}

/// Coatom ground projector `III - M(0,t)/4`.
pub fn a_zero_coatom(t: f64) -> Result<HermitianMatrix> {
    let m = m_family(0.0, t)?;
    Ok(HermitianMatrix::identity(8).add_scaled(&m.dense, -0.25))
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Coatom => "coatom",
        Verdict::NotCoatom => "not-coatom",
        Verdict::Inconclusive => "inconclusive",
    }
}
