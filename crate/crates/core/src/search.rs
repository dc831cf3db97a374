//! Random-direction sampling of exposed points and coatom certificates.
//!
//! A projector P is a coatom of the ground-projector lattice of U exactly when
//! the real space `{B in U : B P = 0}` is a line; that space is computed here
//! as the nullspace of a real linear system in the coefficients of B.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{
    eig_hermitian, hs_inner, kernel_projector_from_eig, rank_from_eig, real_nullspace,
    HermitianMatrix, Projector, DEFAULT_NULLSPACE_TOL, DEFAULT_RANK_TOL,
};
use crate::local_space::{project_onto_space, LocalSpaceBasis};
use crate::random::gaussian_vector;
use crate::sdp::{SdpOptions, SolveStatus, Solver};
use crate::spectra::LmiSpectrahedron;

/// Singular-value gap at the nullspace cutoff below which a certificate is
/// reported as inconclusive.
pub const INCONCLUSIVE_GAP_RATIO: f64 = 1e3;

/// Uniform direction on the unit sphere in R^m.
pub fn random_direction<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = gaussian_vector(m, rng);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Independent generator for one trial: stream `trial` of the seeded ChaCha8.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Coatom,
    NotCoatom,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CoatomCertificate {
    /// dim {B in U : B P = 0}.
    pub dimension: usize,
    pub intersection_basis: Vec<HermitianMatrix>,
    /// Coefficients of each intersection generator in the spanning set used.
    pub coordinates: Vec<Vec<f64>>,
    pub verdict: Verdict,
    pub tolerance_used: f64,
    /// Smallest kept over largest dropped singular value (dropped values are
    /// floored at the cutoff); `None` if nothing was kept.
    pub gap_ratio: Option<f64>,
    /// Dimension of the cone `{B in U : B >= 0, B P = 0}` when the linear
    /// space has dimension at most one; `None` otherwise.
    pub cone_dimension: Option<usize>,
}

/// Certificate for P against the space spanned by `elements` (HS-orthogonal,
/// e.g. a [`LocalSpaceBasis`] including its identity).
pub fn coatom_certificate_in(
    p: &Projector,
    elements: &[HermitianMatrix],
    tol: f64,
) -> Result<CoatomCertificate> {
    let d = p.dim();
    if p.rank == 0 || p.rank >= d {
        return Err(Error::TrivialProjector(d));
    }
    let m = elements.len();
    for e in elements {
        if e.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: e.dim(),
            });
        }
    }
    // Column j of the system holds A_j v for every range vector v of P,
    // real and imaginary parts stacked.
    let columns: Vec<Vec<f64>> = elements
        .iter()
        .map(|a| {
            let mut col = Vec::with_capacity(2 * d * p.rank);
            for v in &p.range_basis {
                for z in a.matvec(v) {
                    col.push(z.re);
                    col.push(z.im);
                }
            }
            col
        })
        .collect();
    let n_rows = 2 * d * p.rank;
    let rows: Vec<Vec<f64>> = (0..n_rows)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let ns = real_nullspace(&rows, m, tol)?;
    let gap_ratio = ns
        .smallest_kept()
        .map(|s| s / ns.largest_dropped().unwrap_or(0.0).max(ns.cutoff));
    let intersection_basis = ns
        .basis
        .iter()
        .map(|coeffs| {
            let mut b = HermitianMatrix::zeros(d);
            for (e, &c) in elements.iter().zip(coeffs) {
                b = b.add_scaled(e, c);
            }
            b
        })
        .collect::<Vec<_>>();
    let cone_dimension = match ns.dimension {
        0 => Some(0),
        1 => Some(is_semidefinite(&intersection_basis[0])? as usize),
        _ => None,
    };
    let verdict = match (gap_ratio, ns.dimension) {
        (Some(r), _) if !(r >= INCONCLUSIVE_GAP_RATIO) => Verdict::Inconclusive,
        (_, 1) if cone_dimension == Some(1) => Verdict::Coatom,
        _ => Verdict::NotCoatom,
    };
    Ok(CoatomCertificate {
        cone_dimension,
        dimension: ns.dimension,
        intersection_basis,
        coordinates: ns.basis,
        verdict,
        tolerance_used: tol,
        gap_ratio,
    })
}

/// Either B or -B is positive semidefinite.
fn is_semidefinite(b: &HermitianMatrix) -> Result<bool> {
    let eig = eig_hermitian(b)?;
    let scale = eig.max_abs();
    let lo = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * scale;
    Ok(lo >= -tol || hi <= tol)
}

pub fn coatom_certificate(
    p: &Projector,
    basis: &LocalSpaceBasis,
    tol: f64,
) -> Result<CoatomCertificate> {
    coatom_certificate_in(p, &basis.elements, tol)
}

/// Sufficient test for P not being a ground projector of U: some A in the
/// complement of U with `P' A P' = lambda P'` and `lambda != 0`.
///
/// Solved as a real nullspace problem in `(coefficients, lambda)`. Returns
/// `false` when no such A exists, which proves nothing.
pub fn quick_reject(p: &Projector, complement_basis: &[HermitianMatrix]) -> Result<bool> {
    let d = p.dim();
    if p.rank >= d {
        return Err(Error::TrivialProjector(d));
    }
    let w = p.complement().range_basis;
    let r = w.len();
    let k = complement_basis.len();
    // Entries (a, b) of W* C_j W for all j, plus -lambda on the diagonal.
    let compressed: Vec<Vec<crate::herm::C64>> = complement_basis
        .iter()
        .map(|c| {
            let cw: Vec<Vec<_>> = w.iter().map(|v| c.matvec(v)).collect();
            let mut out = Vec::with_capacity(r * r);
            for a in 0..r {
                for b in 0..r {
                    out.push(crate::herm::vec_inner(&w[a], &cw[b]));
                }
            }
            out
        })
        .collect();
    let mut rows = Vec::with_capacity(2 * r * r);
    for a in 0..r {
        for b in 0..r {
            let idx = a * r + b;
            let mut re: Vec<f64> = compressed.iter().map(|m| m[idx].re).collect();
            let im: Vec<f64> = compressed.iter().map(|m| m[idx].im).collect();
            re.push(if a == b { -1.0 } else { 0.0 });
            let mut im = im;
            im.push(0.0);
            rows.push(re);
            rows.push(im);
        }
    }
    let ns = real_nullspace(&rows, k + 1, DEFAULT_NULLSPACE_TOL)?;
    Ok(ns.basis.iter().any(|v| v[k].abs() > 1e-6))
}

/// Coordinates of `A = Tr(P)/Tr(P') P' - P` in the spectrahedron basis of U
/// (the identity dropped). For a coatom P, A is an exposed point with ground
/// projector P.
pub fn exposed_point_from_coatom(p: &Projector, basis: &LocalSpaceBasis) -> Result<Vec<f64>> {
    let d = p.dim();
    if p.rank == 0 || p.rank >= d {
        return Err(Error::TrivialProjector(d));
    }
    let resid = project_onto_space(&p.matrix, basis)?.max_abs_diff(&p.matrix);
    if resid > 1e-9 {
        return Err(Error::NotInSpace(resid));
    }
    let a = exposed_matrix(p);
    Ok(basis.coefficients(&a)?[1..].to_vec())
}

/// `Tr(P)/Tr(P') P' - P`.
pub fn exposed_matrix(p: &Projector) -> HermitianMatrix {
    let d = p.dim();
    let r = p.rank as f64;
    let comp = &HermitianMatrix::identity(d) - &p.matrix;
    &comp.scale(r / (d as f64 - r)) - &p.matrix
}

/// Direction `c_i = <A_i, P>` normalized. Minimizing `<c, x>` over S means
/// minimizing `Tr(P (I + A))`, which vanishes exactly on the face of points
/// whose kernel contains the range of P.
pub fn face_direction(s: &LmiSpectrahedron, p: &Projector) -> Result<Vec<f64>> {
    let c: Vec<f64> = s
        .basis()
        .iter()
        .map(|a| hs_inner(a, &p.matrix))
        .collect::<Result<_>>()?;
    let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0) {
        return Err(Error::ZeroObjective);
    }
    Ok(c.into_iter().map(|v| v / n).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed_index: u64,
    pub status: SolveStatus,
    pub direction: Vec<f64>,
    pub x_star: Vec<f64>,
    pub objective: f64,
    pub gap_bound: f64,
    pub newton_iters: usize,
    pub min_eigenvalue: f64,
    pub optimum_rank: usize,
    pub projector_rank: usize,
    pub certificate_dim: Option<usize>,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleOptions {
    pub trials: usize,
    pub seed: u64,
    pub certify: bool,
    pub rank_tol: f64,
    pub sdp: SdpOptions,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            certify: false,
            rank_tol: DEFAULT_RANK_TOL,
            sdp: SdpOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleReport {
    pub trials: usize,
    pub seed: u64,
    /// Optimum rank -> count, converged trials only.
    pub histogram: BTreeMap<usize, usize>,
    /// Kernel projector rank -> count, converged trials only.
    pub projector_histogram: BTreeMap<usize, usize>,
    /// Certificate dimension -> count (when certifying).
    pub certificate_histogram: BTreeMap<usize, usize>,
    pub failures: usize,
    pub records: Vec<SampleRecord>,
}

impl SampleReport {
    pub fn converged(&self) -> usize {
        self.trials - self.failures
    }

    pub fn frequency(&self, rank: usize) -> f64 {
        let n = self.converged();
        if n == 0 {
            return 0.0;
        }
        *self.histogram.get(&rank).unwrap_or(&0) as f64 / n as f64
    }

    pub fn failure_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

/// Runs `opts.trials` independent solves in uniformly random directions on the
/// current rayon pool. Trial i draws its direction from stream i of the seeded
/// generator, so results do not depend on the number of workers.
///
/// `span` is the spanning set of U used for certificates (identity plus the
/// spectrahedron basis); required when `opts.certify` is set.
pub fn sample_extreme_points(
    s: &LmiSpectrahedron,
    span: Option<&[HermitianMatrix]>,
    opts: &SampleOptions,
) -> Result<SampleReport> {
    if s.m() == 0 {
        return Err(Error::EmptySpectrahedron);
    }
    opts.sdp.validate()?;
    if opts.certify && span.is_none() {
        return Err(Error::Parse(
            "certification needs a spanning set of U".into(),
        ));
    }
    let records: Vec<SampleRecord> = (0..opts.trials as u64)
        .into_par_iter()
        .map_init(
            || Solver::new(s, opts.sdp.clone()).expect("validated above"),
            |solver, trial| run_trial(solver, s, span, opts, trial),
        )
        .collect();

    let mut report = SampleReport {
        trials: opts.trials,
        seed: opts.seed,
        histogram: BTreeMap::new(),
        projector_histogram: BTreeMap::new(),
        certificate_histogram: BTreeMap::new(),
        failures: 0,
        records,
    };
    for r in &report.records {
        if r.status != SolveStatus::Converged {
            report.failures += 1;
            continue;
        }
        *report.histogram.entry(r.optimum_rank).or_default() += 1;
        *report
            .projector_histogram
            .entry(r.projector_rank)
            .or_default() += 1;
        if let Some(k) = r.certificate_dim {
            *report.certificate_histogram.entry(k).or_default() += 1;
        }
    }
    Ok(report)
}

fn run_trial(
    solver: &mut Solver,
    s: &LmiSpectrahedron,
    span: Option<&[HermitianMatrix]>,
    opts: &SampleOptions,
    trial: u64,
) -> SampleRecord {
    let mut rng = trial_rng(opts.seed, trial);
    let direction = random_direction(s.m(), &mut rng);
    let failed = |direction: Vec<f64>| SampleRecord {
        seed_index: trial,
        status: SolveStatus::NumericalFailure,
        x_star: vec![f64::NAN; direction.len()],
        direction,
        objective: f64::NAN,
        gap_bound: f64::NAN,
        newton_iters: 0,
        min_eigenvalue: f64::NAN,
        optimum_rank: 0,
        projector_rank: 0,
        certificate_dim: None,
        verdict: None,
    };
    let sol = match solver.solve(&direction) {
        Ok(sol) => sol,
        Err(_) => return failed(direction),
    };
    let eig = match eig_hermitian(&sol.optimum_matrix) {
        Ok(e) => e,
        Err(_) => return failed(direction),
    };
    let optimum_rank = rank_from_eig(&eig, opts.rank_tol);
    let kernel = kernel_projector_from_eig(&eig, opts.rank_tol);
    let (mut certificate_dim, mut verdict) = (None, None);
    if opts.certify && sol.status == SolveStatus::Converged && kernel.rank > 0 {
        if let Ok(cert) = coatom_certificate_in(&kernel, span.unwrap_or(&[]), DEFAULT_NULLSPACE_TOL)
        {
            certificate_dim = Some(cert.dimension);
            verdict = Some(cert.verdict);
        }
    }
    SampleRecord {
        seed_index: trial,
        status: sol.status,
        direction,
        x_star: sol.x_star,
        objective: sol.objective,
        gap_bound: sol.gap_bound,
        newton_iters: sol.newton_iters,
        min_eigenvalue: eig.min(),
        optimum_rank,
        projector_rank: kernel.rank,
        certificate_dim,
        verdict,
    }
}

/// Identity followed by the spectrahedron basis: a spanning set of U.
pub fn span_with_identity(s: &LmiSpectrahedron) -> Vec<HermitianMatrix> {
    let mut v = vec![HermitianMatrix::identity(s.d())];
    v.extend(s.basis().iter().cloned());
    v
}
