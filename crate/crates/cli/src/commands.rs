use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use coatom_core::classical::{
    edge_table, ff_ground_projector_form, is_m_feasible, ClassicalModel, SupportSet,
};
use coatom_core::family::{certify_family, is_special, special_values_report, verdict_name};
use coatom_core::herm::{eig_hermitian, ground_projector_from_eig, hs_inner};
use coatom_core::search::{
    coatom_certificate_in, span_with_identity, SampleOptions, SampleRecord, SampleReport,
};
use coatom_core::{HermitianMatrix, Hypergraph, LmiSpectrahedron, Model, SolveStatus, Verdict};
use serde::Serialize;

use crate::args::{
    CayleyArgs, CertifyArgs, EnumerateArgs, FactorArgs, FamilyArgs, Format, SampleArgs,
};
use crate::output::{self, join_floats};

/// Bad flags or unreadable input; exits with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(Usage(e.to_string()))
}

pub enum Exit {
    Ok,
    /// A quality gate failed; exits with status 3.
    Gate(String),
}

/// Spectrahedron plus a spanning set of U (identity first) with labels.
struct Target {
    name: String,
    s: LmiSpectrahedron,
    span: Vec<HermitianMatrix>,
    labels: Vec<String>,
}

impl Target {
    fn parse(name: &str) -> Result<Self> {
        if name == "cayley" {
            let s = LmiSpectrahedron::cayley_cubic();
            let span = span_with_identity(&s);
            let mut labels = vec!["I".to_string()];
            labels.extend(s.labels().iter().cloned());
            return Ok(Self {
                name: name.into(),
                s,
                span,
                labels,
            });
        }
        let model: Model = name.parse().map_err(|e| usage(format!("{e} or cayley")))?;
        let basis = model.basis();
        Ok(Self {
            name: name.into(),
            s: LmiSpectrahedron::from_local_space(&basis)?,
            span: basis.elements.clone(),
            labels: basis.labels.clone(),
        })
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(usage("--workers must be at least 1")),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build()?;
            Ok(pool.install(f))
        }
    }
}

fn run_sampling(
    target: &Target,
    trials: usize,
    seed: u64,
    rank_tol: f64,
    certify: bool,
    solver: &crate::args::SolverArgs,
    workers: Option<usize>,
) -> Result<SampleReport> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(usage("--rank-tol must lie in (0, 1)"));
    }
    let opts = SampleOptions {
        trials,
        seed,
        certify,
        rank_tol,
        sdp: solver.options(),
    };
    opts.sdp.validate().map_err(usage)?;
    let span = certify.then_some(target.span.as_slice());
    Ok(with_workers(workers, || {
        coatom_core::sample_extreme_points(&target.s, span, &opts)
    })??)
}

#[derive(Serialize)]
struct SampleBody<'a> {
    model: &'a str,
    d: usize,
    m: usize,
    trials: usize,
    converged: usize,
    failures: usize,
    failure_fraction: f64,
    histogram: &'a BTreeMap<usize, usize>,
    frequencies: BTreeMap<usize, f64>,
    projector_histogram: &'a BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    certificate_histogram: &'a BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    records: Option<&'a [SampleRecord]>,
}

#[derive(Serialize)]
struct CsvRecord {
    seed_index: u64,
    status: SolveStatus,
    objective: f64,
    gap_bound: f64,
    newton_iters: usize,
    min_eigenvalue: f64,
    optimum_rank: usize,
    projector_rank: usize,
    certificate_dim: Option<usize>,
    verdict: Option<Verdict>,
    direction: String,
    x_star: String,
}

fn frequencies(report: &SampleReport) -> BTreeMap<usize, f64> {
    report
        .histogram
        .keys()
        .map(|&r| (r, report.frequency(r)))
        .collect()
}

fn histogram_table(out: &mut String, title: &str, report: &SampleReport) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:>6} {:>8} {:>10}", "rank", "count", "frequency");
    for (rank, count) in &report.histogram {
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>9.3}%",
            rank,
            count,
            100.0 * report.frequency(*rank)
        );
    }
}

fn failure_gate(report: &SampleReport) -> Exit {
    if report.failure_fraction() > 0.01 {
        Exit::Gate(format!(
            "{} of {} trials failed ({:.2}% > 1%)",
            report.failures,
            report.trials,
            100.0 * report.failure_fraction()
        ))
    } else {
        Exit::Ok
    }
}

pub fn sample(args: &SampleArgs) -> Result<Exit> {
    let target = Target::parse(&args.model)?;
    let start = Instant::now();
    let report = run_sampling(
        &target,
        args.trials,
        args.seed,
        args.rank_tol,
        args.certify,
        &args.solver,
        args.workers,
    )?;
    let elapsed = start.elapsed();
    let text = match args.output.format {
        Format::Json => {
            let body = SampleBody {
                model: &target.name,
                d: target.s.d(),
                m: target.s.m(),
                trials: report.trials,
                converged: report.converged(),
                failures: report.failures,
                failure_fraction: report.failure_fraction(),
                histogram: &report.histogram,
                frequencies: frequencies(&report),
                projector_histogram: &report.projector_histogram,
                certificate_histogram: &report.certificate_histogram,
                records: (!args.omit_records).then_some(report.records.as_slice()),
            };
            output::json("sample", args, Some(args.seed), &body, elapsed)?
        }
        Format::Csv => {
            let rows: Vec<CsvRecord> = report
                .records
                .iter()
                .map(|r| CsvRecord {
                    seed_index: r.seed_index,
                    status: r.status,
                    objective: r.objective,
                    gap_bound: r.gap_bound,
                    newton_iters: r.newton_iters,
                    min_eigenvalue: r.min_eigenvalue,
                    optimum_rank: r.optimum_rank,
                    projector_rank: r.projector_rank,
                    certificate_dim: r.certificate_dim,
                    verdict: r.verdict,
                    direction: join_floats(&r.direction),
                    x_star: join_floats(&r.x_star),
                })
                .collect();
            output::csv(&rows)?
        }
        Format::Table => {
            let mut s = String::new();
            let title = format!(
                "model {}  trials {}  seed {}  failures {}",
                target.name, report.trials, report.seed, report.failures
            );
            histogram_table(&mut s, &title, &report);
            let _ = writeln!(
                s,
                "kernel projector ranks: {:?}",
                report.projector_histogram
            );
            if !report.certificate_histogram.is_empty() {
                let _ = writeln!(
                    s,
                    "certificate dimensions: {:?}",
                    report.certificate_histogram
                );
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    eprintln!(
        "sample: {} trials, {} failures, {:.2}s",
        report.trials,
        report.failures,
        elapsed.as_secs_f64()
    );
    Ok(failure_gate(&report))
}

#[derive(Serialize)]
struct Term {
    label: String,
    coefficient: f64,
}

#[derive(Serialize)]
struct CertifyBody {
    model: String,
    source: String,
    dim: usize,
    ground_projector_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_energy: Option<f64>,
    /// Largest entry of A minus its projection onto U.
    #[serde(skip_serializing_if = "Option::is_none")]
    in_space_residual: Option<f64>,
    dimension: usize,
    cone_dimension: Option<usize>,
    verdict: &'static str,
    gap_ratio: Option<f64>,
    tolerance_used: f64,
    generators: Vec<Vec<Term>>,
}

fn span_residual(span: &[HermitianMatrix], a: &HermitianMatrix) -> Result<f64> {
    let mut proj = HermitianMatrix::zeros(a.dim());
    for e in span {
        let c = hs_inner(e, a)? / hs_inner(e, e)?;
        proj = proj.add_scaled(e, c);
    }
    Ok(proj.max_abs_diff(a))
}

pub fn certify(args: &CertifyArgs) -> Result<Exit> {
    let target = Target::parse(&args.model)?;
    let d = target.s.d();
    let start = Instant::now();
    let (source, p, ground_energy, residual) = match (&args.matrix, &args.support) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
            let a = HermitianMatrix::from_json(&text).map_err(usage)?;
            if a.dim() != d {
                return Err(usage(format!(
                    "matrix has dimension {} but model {} acts on dimension {d}",
                    a.dim(),
                    target.name
                )));
            }
            let eig = eig_hermitian(&a)?;
            let p = ground_projector_from_eig(&eig, args.gap_tol);
            let r = span_residual(&target.span, &a)?;
            (path.display().to_string(), p, Some(eig.min()), Some(r))
        }
        (None, Some(mask)) => {
            if !d.is_power_of_two() {
                return Err(usage("support masks need a model on binary units"));
            }
            let f = SupportSet::parse(d.trailing_zeros() as usize, mask).map_err(usage)?;
            (f.label(), f.to_projector(), None, None)
        }
        (None, None) => return Err(usage("pass --matrix or --support")),
    };
    if p.rank == 0 || p.rank >= d {
        bail!(
            "ground projector has rank {} of {d}; only proper nonzero projectors can be coatoms",
            p.rank
        );
    }
    let cert = coatom_certificate_in(&p, &target.span, args.tol)?;
    let generators = cert
        .coordinates
        .iter()
        .map(|coords| {
            let scale = coords.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let lead = coords
                .iter()
                .find(|c| c.abs() > 1e-9 * scale)
                .copied()
                .unwrap_or(1.0);
            coords
                .iter()
                .zip(&target.labels)
                .filter(|(c, _)| c.abs() > 1e-9 * scale)
                .map(|(c, l)| Term {
                    label: l.clone(),
                    coefficient: c / lead.abs(),
                })
                .collect()
        })
        .collect();
    let body = CertifyBody {
        model: target.name.clone(),
        source,
        dim: d,
        ground_projector_rank: p.rank,
        ground_energy,
        in_space_residual: residual,
        dimension: cert.dimension,
        cone_dimension: cert.cone_dimension,
        verdict: verdict_name(cert.verdict),
        gap_ratio: cert.gap_ratio,
        tolerance_used: cert.tolerance_used,
        generators,
    };
    let elapsed = start.elapsed();
    let text = match args.output.format {
        Format::Json => output::json("certify", args, None, &body, elapsed)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                model: &'a str,
                source: &'a str,
                ground_projector_rank: usize,
                dimension: usize,
                cone_dimension: Option<usize>,
                verdict: &'a str,
            }
            output::csv(&[Row {
                model: &body.model,
                source: &body.source,
                ground_projector_rank: body.ground_projector_rank,
                dimension: body.dimension,
                cone_dimension: body.cone_dimension,
                verdict: body.verdict,
            }])?
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "source: {}  model: {}", body.source, body.model);
            let _ = writeln!(s, "ground projector rank: {}", body.ground_projector_rank);
            if let Some(r) = body.in_space_residual {
                let _ = writeln!(s, "distance from U: {r:.3e}");
            }
            let _ = writeln!(
                s,
                "certificate dimension: {}  cone dimension: {}  verdict: {}",
                body.dimension,
                body.cone_dimension.map_or("-".into(), |c| c.to_string()),
                body.verdict
            );
            for (k, g) in body.generators.iter().enumerate() {
                let terms: Vec<String> = g
                    .iter()
                    .map(|t| format!("{:+.6} {}", t.coefficient, t.label))
                    .collect();
                let _ = writeln!(s, "generator {}: {}", k + 1, terms.join(" "));
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    Ok(Exit::Ok)
}

#[derive(Serialize)]
struct EnumRow {
    edge: String,
    diag: String,
    expansion: String,
    coatom: String,
}

fn mask_string(f: &SupportSet) -> String {
    f.diag().iter().map(|v| v.to_string()).collect()
}

pub fn enumerate(args: &EnumerateArgs) -> Result<Exit> {
    let model: ClassicalModel = args.model.parse().map_err(usage)?;
    let start = Instant::now();
    let rows: Vec<EnumRow> = edge_table(model)
        .into_iter()
        .map(|r| EnumRow {
            coatom: mask_string(&r.coatom),
            edge: r.label,
            diag: r.diag,
            expansion: r.expansion,
        })
        .collect();
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                model: &'a str,
                count: usize,
                rows: &'a [EnumRow],
            }
            let body = Body {
                model: model.name(),
                count: rows.len(),
                rows: &rows,
            };
            output::json("enumerate-classical", args, None, &body, start.elapsed())?
        }
        Format::Csv => output::csv(&rows)?,
        Format::Table => {
            let mut s = format!(
                "{} coatoms of {} (complements of the edges below)\n",
                rows.len(),
                model.name()
            );
            for r in &rows {
                let _ = writeln!(s, "{} = {} = {}", r.edge, r.diag, r.expansion);
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    Ok(Exit::Ok)
}

#[derive(Serialize)]
struct FactorRow {
    units: Vec<usize>,
    excluded: Vec<String>,
    factor: String,
}

#[derive(Serialize)]
struct FactorBody {
    graph: String,
    support: String,
    mask: String,
    complement: String,
    m_feasible: bool,
    decomposition: Option<Vec<FactorRow>>,
}

pub fn factor_check(args: &FactorArgs) -> Result<Exit> {
    let g = match args.graph.as_str() {
        "c3" => Hypergraph::c3(),
        "p3" => Hypergraph::p3(),
        other => return Err(usage(format!("unknown graph '{other}' (c3, p3)"))),
    };
    let start = Instant::now();
    let f = SupportSet::parse(g.n_units(), &args.support).map_err(usage)?;
    let feasible = is_m_feasible(&f, &g)?;
    let form = ff_ground_projector_form(&f, &g)?;
    if feasible != form.is_some() {
        bail!(
            "M-feasibility and the cylinder decomposition disagree for {}",
            f.label()
        );
    }
    let decomposition = form.map(|factors| {
        factors
            .iter()
            .map(|c| FactorRow {
                units: c.nu.clone(),
                excluded: c
                    .excluded
                    .iter()
                    .map(|&y| coatom_core::classical::config_label(y, c.nu.len()))
                    .collect(),
                factor: c.describe(),
            })
            .collect::<Vec<_>>()
    });
    let body = FactorBody {
        graph: args.graph.clone(),
        support: f.label(),
        mask: mask_string(&f),
        complement: f.complement().label(),
        m_feasible: feasible,
        decomposition,
    };
    let text = match args.output.format {
        Format::Json => output::json("factor-check", args, None, &body, start.elapsed())?,
        Format::Csv => output::csv(
            body.decomposition
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .map(|r| {
                    #[derive(Serialize)]
                    struct Row {
                        units: String,
                        excluded: String,
                        factor: String,
                    }
                    Row {
                        units: r
                            .units
                            .iter()
                            .map(|u| u.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        excluded: r.excluded.join(" "),
                        factor: r.factor.clone(),
                    }
                })
                .collect::<Vec<_>>()
                .as_slice(),
        )?,
        Format::Table => {
            let mut s = format!(
                "support {} (complement {}) on {}: {}\n",
                body.support,
                body.complement,
                body.graph,
                if feasible {
                    "M-feasible"
                } else {
                    "not M-feasible"
                }
            );
            for r in body.decomposition.iter().flatten() {
                let _ = writeln!(s, "  {}", r.factor);
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    Ok(Exit::Ok)
}

/// Parses `0.5`, `pi`, `pi/4`, `3pi/8`, `3*pi/8`.
pub fn parse_value(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || usage(format!("cannot parse '{t}' as a number"));
    if let Some(i) = t.find("pi") {
        let (num, rest) = (&t[..i], &t[i + 2..]);
        let num = num.trim_end_matches('*').trim();
        let k: f64 = if num.is_empty() {
            1.0
        } else {
            num.parse().map_err(|_| bad())?
        };
        let den: f64 = match rest.trim() {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())?,
        };
        return Ok(k * PI / den);
    }
    t.parse().map_err(|_| bad())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    let v = s.split(',').map(parse_value).collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(usage("empty grid"));
    }
    Ok(v)
}

#[derive(Serialize)]
struct FamilyRow {
    a: f64,
    t: f64,
    rank: usize,
    projector_rank: usize,
    certificate_dim: usize,
    cone_dimension: Option<usize>,
    verdict: &'static str,
    collinear: bool,
}

pub fn verify_family(args: &FamilyArgs) -> Result<Exit> {
    let a_grid = parse_list(&args.a_grid)?;
    let t_grid = parse_list(&args.t_grid)?;
    for &a in &a_grid {
        if !(0.0..=2.0).contains(&a) {
            return Err(usage(format!("a = {a} outside [0, 2]")));
        }
    }
    for &t in &t_grid {
        if !(0.0..PI).contains(&t) {
            return Err(usage(format!("t = {t} outside [0, pi)")));
        }
    }
    let start = Instant::now();
    let certs = certify_family(&a_grid, &t_grid)?;
    let rows: Vec<FamilyRow> = certs
        .iter()
        .map(|c| FamilyRow {
            a: c.a,
            t: c.t,
            rank: c.rank,
            projector_rank: c.projector_rank,
            certificate_dim: c.certificate.dimension,
            cone_dimension: c.certificate.cone_dimension,
            verdict: verdict_name(c.certificate.verdict),
            collinear: c.is_collinear(),
        })
        .collect();
    let generic_ok = certs.iter().filter(|c| !is_special(c.a, c.t)).all(|c| {
        c.certificate.verdict == Verdict::Coatom && c.is_collinear() && c.projector_rank == 5
    });
    let special = if args.include_special {
        Some(special_values_report()?)
    } else {
        None
    };
    let special_ok = special.as_ref().map(|rows| rows.iter().all(|r| r.agrees()));
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a, S: Serialize> {
                rows: &'a [FamilyRow],
                generic_all_coatom: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                special: Option<S>,
                #[serde(skip_serializing_if = "Option::is_none")]
                special_agrees: Option<bool>,
            }
            let body = Body {
                rows: &rows,
                generic_all_coatom: generic_ok,
                special: special.as_ref(),
                special_agrees: special_ok,
            };
            output::json("verify-family", args, None, &body, start.elapsed())?
        }
        Format::Csv => output::csv(&rows)?,
        Format::Table => {
            let mut s = String::from(
                "| a | t | rank | projector rank | certificate dim | verdict | collinear with M |\n|---|---|---|---|---|---|---|\n",
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "| {:.4} | {:.4} | {} | {} | {} | {} | {} |",
                    r.a, r.t, r.rank, r.projector_rank, r.certificate_dim, r.verdict, r.collinear
                );
            }
            if let Some(sp) = &special {
                s.push_str("\n| line | a | t | rank | certificate dim | point | extreme | paper |\n|---|---|---|---|---|---|---|---|\n");
                for r in sp {
                    let _ = writeln!(
                        s,
                        "| {} | {:.4} | {:.4} | {} | {} | {:?} | {} | {} |",
                        r.regime.name(),
                        r.a,
                        r.t,
                        r.rank,
                        r.certificate_dim,
                        r.point_class,
                        r.extreme,
                        r.expected_extreme
                    );
                }
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    if !generic_ok {
        return Ok(Exit::Gate(
            "a generic grid point failed certification".into(),
        ));
    }
    if special_ok == Some(false) {
        return Ok(Exit::Gate(
            "special-value classification disagrees with the paper".into(),
        ));
    }
    Ok(Exit::Ok)
}

/// Rank-one optimizers of the Cayley cubic are its four vertices.
pub const CAYLEY_VERTICES: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

#[derive(Serialize)]
struct VertexRow {
    vertex: [f64; 3],
    count: usize,
    max_distance: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Greedy clustering of points at the given radius.
fn cluster_count(points: &[&[f64]], radius: f64) -> usize {
    let mut centers: Vec<&[f64]> = Vec::new();
    for p in points {
        if !centers.iter().any(|c| distance(c, p) <= radius) {
            centers.push(p);
        }
    }
    centers.len()
}

pub fn cayley_demo(args: &CayleyArgs) -> Result<Exit> {
    let target = Target::parse("cayley")?;
    let start = Instant::now();
    let report = run_sampling(
        &target,
        args.trials,
        args.seed,
        args.rank_tol,
        false,
        &args.solver,
        args.workers,
    )?;
    let rank_one: Vec<&[f64]> = report
        .records
        .iter()
        .filter(|r| r.status == SolveStatus::Converged && r.optimum_rank == 1)
        .map(|r| r.x_star.as_slice())
        .collect();
    let mut vertices: Vec<VertexRow> = CAYLEY_VERTICES
        .iter()
        .map(|v| VertexRow {
            vertex: *v,
            count: 0,
            max_distance: 0.0,
        })
        .collect();
    for x in &rank_one {
        let (k, dist) = CAYLEY_VERTICES
            .iter()
            .map(|v| distance(v, x))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four vertices");
        vertices[k].count += 1;
        vertices[k].max_distance = vertices[k].max_distance.max(dist);
    }
    let max_vertex_distance = vertices.iter().fold(0.0f64, |m, v| m.max(v.max_distance));
    let distinct = cluster_count(&rank_one, 1e-3);
    let elapsed = start.elapsed();
    let text = match args.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                trials: usize,
                failures: usize,
                histogram: &'a BTreeMap<usize, usize>,
                rank1_fraction: f64,
                distinct_rank1_optimizers: usize,
                vertices: &'a [VertexRow],
                max_vertex_distance: f64,
            }
            let body = Body {
                trials: report.trials,
                failures: report.failures,
                histogram: &report.histogram,
                rank1_fraction: report.frequency(1),
                distinct_rank1_optimizers: distinct,
                vertices: &vertices,
                max_vertex_distance,
            };
            output::json("cayley-demo", args, Some(args.seed), &body, elapsed)?
        }
        Format::Csv => output::csv(&vertices)?,
        Format::Table => {
            let mut s = String::new();
            let title = format!(
                "Cayley cubic  trials {}  seed {}  failures {}",
                report.trials, report.seed, report.failures
            );
            histogram_table(&mut s, &title, &report);
            let _ = writeln!(s, "rank-one optimizers: {} distinct", distinct);
            for v in &vertices {
                let _ = writeln!(
                    s,
                    "  vertex {:?}: {} hits, max distance {:.2e}",
                    v.vertex, v.count, v.max_distance
                );
            }
            s
        }
    };
    output::emit(args.output.out.as_deref(), &text)?;
    Ok(failure_gate(&report))
}
