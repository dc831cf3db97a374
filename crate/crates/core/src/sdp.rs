//! Log-barrier interior-point method for `min <c, x>` over a spectrahedron.
//!
//! Stage k minimizes `f_t(x) = t <c, x> - log det S(x)` with `S(x) = I + sum x_i A_i`
//! by damped Newton steps, starting from `x = 0` and multiplying `t` by `mu`
//! between stages. On the central path the duality gap is exactly `d / t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, HermitianMatrix, C64};
use crate::spectra::LmiSpectrahedron;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub gap_tol: f64,
    pub mu: f64,
    pub t0: f64,
    pub max_outer: usize,
    pub max_newton: usize,
    /// Centering stops once half the squared Newton decrement drops below this.
    pub newton_tol: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Normwise backward error of the Newton solve above which the run fails.
    pub solve_residual_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            mu: 4.0,
            t0: 1.0,
            max_outer: 60,
            max_newton: 100,
            newton_tol: 1e-10,
            alpha: 0.25,
            beta: 0.5,
            solve_residual_tol: 1e-6,
        }
    }
}

impl SdpOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, range| Err(Error::ParameterOutOfRange { name, value, range });
        if !(self.gap_tol > 0.0) {
            return bad("gap_tol", self.gap_tol, "(0, inf)");
        }
        if !(self.mu > 1.0) {
            return bad("mu", self.mu, "(1, inf)");
        }
        if !(self.t0 > 0.0) {
            return bad("t0", self.t0, "(0, inf)");
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad("alpha", self.alpha, "(0, 0.5)");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", self.beta, "(0, 1)");
        }
        if self.max_outer == 0 {
            return bad("max_outer", 0.0, "[1, inf)");
        }
        if self.max_newton == 0 {
            return bad("max_newton", 0.0, "[1, inf)");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationCap,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x_star: Vec<f64>,
    pub optimum_matrix: HermitianMatrix,
    pub objective: f64,
    /// `d / t` at termination.
    pub gap_bound: f64,
    pub newton_iters: usize,
    pub status: SolveStatus,
    /// Barrier parameter of the last completed stage.
    pub t_final: f64,
    /// `<c, x>` after each completed stage.
    pub stage_objectives: Vec<f64>,
    /// Copy of the objective direction.
    pub c: Vec<f64>,
}

/// Minimizes `<c, x>` over the spectrahedron with a fresh workspace.
pub fn minimize(s: &LmiSpectrahedron, c: &[f64], opts: &SdpOptions) -> Result<SdpSolution> {
    Solver::new(s, opts.clone())?.solve(c)
}

/// `(feasibility, stationarity)`: the negative part of `lambda_min` of the
/// optimum matrix and `||t c - grad log det|| / t` at the final `t`.
pub fn dual_residuals(s: &LmiSpectrahedron, sol: &SdpSolution) -> Result<(f64, f64)> {
    let lmin = eig_hermitian(&sol.optimum_matrix)?.min();
    let feasibility = -lmin.min(0.0);
    let mut ws = Workspace::new(s.d(), s.m());
    ws.assemble(s, &sol.x_star);
    let stationarity = if ws.cholesky() {
        ws.invert_factor();
        ws.factor_rows(s, &sol.c, sol.t_final);
        ws.grad.iter().map(|g| g * g).sum::<f64>().sqrt() / sol.t_final
    } else {
        f64::INFINITY
    };
    Ok((feasibility, stationarity))
}

/// Reusable solver bound to one spectrahedron. Each instance owns its
/// buffers, so one solver per worker thread avoids reallocation.
pub struct Solver<'a> {
    s: &'a LmiSpectrahedron,
    opts: SdpOptions,
    ws: Workspace,
}

impl<'a> Solver<'a> {
    pub fn new(s: &'a LmiSpectrahedron, opts: SdpOptions) -> Result<Self> {
        if s.m() == 0 {
            return Err(Error::EmptySpectrahedron);
        }
        opts.validate()?;
        Ok(Self {
            s,
            opts,
            ws: Workspace::new(s.d(), s.m()),
        })
    }

    pub fn options(&self) -> &SdpOptions {
        &self.opts
    }

    pub fn solve(&mut self, c: &[f64]) -> Result<SdpSolution> {
        let (s, opts, ws) = (self.s, &self.opts, &mut self.ws);
        let m = s.m();
        let d = s.d() as f64;
        if c.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: c.len(),
            });
        }
        let cnorm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(cnorm > 0.0) || !cnorm.is_finite() {
            return Err(Error::ZeroObjective);
        }

        let mut x = vec![0.0; m];
        let mut x_trial = vec![0.0; m];
        let mut t = opts.t0;
        let mut newton_iters = 0;
        let mut stage_objectives = Vec::new();
        let mut status = SolveStatus::IterationCap;
        let mut t_final = t;

        'outer: for _stage in 0..opts.max_outer {
            let mut centered = false;
            for _ in 0..opts.max_newton {
                ws.assemble(s, &x);
                if !ws.cholesky() {
                    status = SolveStatus::NumericalFailure;
                    break 'outer;
                }
                let f0 = t * dot(c, &x) - ws.logdet();
                ws.invert_factor();
                ws.factor_rows(s, c, t);
                ws.hessian();
                if !ws.newton_direction(opts.solve_residual_tol) {
                    status = SolveStatus::NumericalFailure;
                    break 'outer;
                }
                newton_iters += 1;
                let lambda_sq = -dot(&ws.grad, &ws.dx);
                if !(lambda_sq >= 0.0) {
                    status = SolveStatus::NumericalFailure;
                    break 'outer;
                }
                if lambda_sq / 2.0 <= opts.newton_tol {
                    centered = true;
                    break;
                }
                // Inside the quadratic convergence region the full step stays
                // feasible and decreases f_t; an Armijo test there would only
                // measure rounding noise of f_t.
                let quadratic = lambda_sq.sqrt() < 0.25;
                let mut step = 1.0;
                loop {
                    for i in 0..m {
                        x_trial[i] = x[i] + step * ws.dx[i];
                    }
                    ws.assemble(s, &x_trial);
                    if ws.cholesky() {
                        if quadratic {
                            break;
                        }
                        let f1 = t * dot(c, &x_trial) - ws.logdet();
                        if f1 <= f0 - opts.alpha * step * lambda_sq {
                            break;
                        }
                    }
                    step *= opts.beta;
                    if step < 1e-20 {
                        status = SolveStatus::NumericalFailure;
                        break 'outer;
                    }
                }
                x.copy_from_slice(&x_trial);
            }
            stage_objectives.push(dot(c, &x));
            t_final = t;
            if d / t <= opts.gap_tol {
                status = if centered {
                    SolveStatus::Converged
                } else {
                    SolveStatus::IterationCap
                };
                break;
            }
            t *= opts.mu;
        }

        let optimum_matrix = s.assemble(&x)?;
        Ok(SdpSolution {
            objective: dot(c, &x),
            x_star: x,
            optimum_matrix,
            gap_bound: d / t_final,
            newton_iters,
            status,
            t_final,
            stage_objectives,
            c: c.to_vec(),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dot product with four independent accumulators (fixed summation order).
fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

const Z: C64 = C64::new(0.0, 0.0);

struct Workspace {
    d: usize,
    m: usize,
    s: Vec<C64>,
    /// Cholesky factor of S and its inverse, both lower triangular.
    l: Vec<C64>,
    linv: Vec<C64>,
    lt_re: Vec<f64>,
    lt_im: Vec<f64>,
    m_re: Vec<f64>,
    m_im: Vec<f64>,
    acc_re: Vec<f64>,
    acc_im: Vec<f64>,
    /// Row i packs the upper triangle of `L^{-1} A_i L^{-*}` into d^2 reals
    /// (off-diagonal entries scaled by sqrt 2), so that `H = G G^T`.
    g: Vec<f64>,
    grad: Vec<f64>,
    hess: Vec<f64>,
    scale: Vec<f64>,
    chol: Vec<f64>,
    dx: Vec<f64>,
    rhs: Vec<f64>,
}

impl Workspace {
    fn new(d: usize, m: usize) -> Self {
        Self {
            d,
            m,
            s: vec![Z; d * d],
            l: vec![Z; d * d],
            linv: vec![Z; d * d],
            lt_re: vec![0.0; d * d],
            lt_im: vec![0.0; d * d],
            m_re: vec![0.0; d * d],
            m_im: vec![0.0; d * d],
            acc_re: vec![0.0; d],
            acc_im: vec![0.0; d],
            g: vec![0.0; m * d * d],
            grad: vec![0.0; m],
            hess: vec![0.0; m * m],
            scale: vec![0.0; m],
            chol: vec![0.0; m * m],
            dx: vec![0.0; m],
            rhs: vec![0.0; m],
        }
    }

    fn assemble(&mut self, sp: &LmiSpectrahedron, x: &[f64]) {
        let d = self.d;
        self.s.iter_mut().for_each(|v| *v = Z);
        for i in 0..d {
            self.s[i * d + i] = C64::new(1.0, 0.0);
        }
        for (a, &xi) in sp.sparse_basis().iter().zip(x) {
            for &(r, c, v) in &a.entries {
                self.s[r * d + c] += v * xi;
            }
        }
    }

    /// Lower Cholesky factor of `s` into `l`; false unless S > 0.
    fn cholesky(&mut self) -> bool {
        let d = self.d;
        let (s, l) = (&self.s, &mut self.l);
        l.iter_mut().for_each(|v| *v = Z);
        for j in 0..d {
            let mut diag = s[j * d + j].re;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = C64::new(ljj, 0.0);
            for i in j + 1..d {
                let mut v = s[i * d + j];
                for k in 0..j {
                    v -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = v / ljj;
            }
        }
        true
    }

    fn logdet(&self) -> f64 {
        (0..self.d)
            .map(|i| self.l[i * self.d + i].re.ln())
            .sum::<f64>()
            * 2.0
    }

    /// `L^{-1}` by forward substitution, stored transposed and split into
    /// real and imaginary parts: `lt_re[k * d + q] + i lt_im[k * d + q] = (L^{-1})_{qk}`.
    fn invert_factor(&mut self) {
        let d = self.d;
        let (l, linv) = (&self.l, &mut self.linv);
        linv.iter_mut().for_each(|v| *v = Z);
        for j in 0..d {
            linv[j * d + j] = C64::new(1.0 / l[j * d + j].re, 0.0);
            for i in j + 1..d {
                let mut v = Z;
                for k in j..i {
                    v -= l[i * d + k] * linv[k * d + j];
                }
                linv[i * d + j] = v / l[i * d + i].re;
            }
        }
        for q in 0..d {
            for k in 0..d {
                let z = linv[q * d + k];
                self.lt_re[k * d + q] = z.re;
                self.lt_im[k * d + q] = z.im;
            }
        }
    }

    /// Fills `g` and the gradient `t c_i - Tr(S^{-1} A_i) = t c_i - Tr(L^{-1} A_i L^{-*})`.
    fn factor_rows(&mut self, sp: &LmiSpectrahedron, c: &[f64], t: f64) {
        let d = self.d;
        let dd = d * d;
        let sqrt2 = std::f64::consts::SQRT_2;
        for (i, a) in sp.sparse_basis().iter().enumerate() {
            // M = L^{-1} A_i, column `col` gathers column k of L^{-1} times v.
            self.m_re.iter_mut().for_each(|v| *v = 0.0);
            self.m_im.iter_mut().for_each(|v| *v = 0.0);
            for &(k, col, v) in &a.entries {
                for r in k..d {
                    let (lr, li) = (self.lt_re[k * d + r], self.lt_im[k * d + r]);
                    self.m_re[r * d + col] += lr * v.re - li * v.im;
                    self.m_im[r * d + col] += lr * v.im + li * v.re;
                }
            }
            // Row p of M L^{-*}: acc[q] = sum_k M[p,k] conj((L^{-1})_{qk}).
            let row = &mut self.g[i * dd..(i + 1) * dd];
            let mut idx = 0;
            let mut trace = 0.0;
            for p in 0..d {
                let (acc_re, acc_im) = (&mut self.acc_re[..d], &mut self.acc_im[..d]);
                acc_re.iter_mut().for_each(|v| *v = 0.0);
                acc_im.iter_mut().for_each(|v| *v = 0.0);
                for k in 0..d {
                    let (mr, mi) = (self.m_re[p * d + k], self.m_im[p * d + k]);
                    if mr == 0.0 && mi == 0.0 {
                        continue;
                    }
                    let lr = &self.lt_re[k * d..(k + 1) * d];
                    let li = &self.lt_im[k * d..(k + 1) * d];
                    for q in p.max(k)..d {
                        acc_re[q] += mr * lr[q] + mi * li[q];
                        acc_im[q] += mi * lr[q] - mr * li[q];
                    }
                }
                row[idx] = acc_re[p];
                trace += acc_re[p];
                idx += 1;
                for q in p + 1..d {
                    row[idx] = sqrt2 * acc_re[q];
                    row[idx + 1] = sqrt2 * acc_im[q];
                    idx += 2;
                }
            }
            self.grad[i] = t * c[i] - trace;
        }
    }

    /// `H_ij = Re Tr(S^{-1} A_i S^{-1} A_j) = <g_i, g_j>`.
    fn hessian(&mut self) {
        let (m, dd) = (self.m, self.d * self.d);
        for i in 0..m {
            let gi = &self.g[i * dd..(i + 1) * dd];
            for j in i..m {
                let gj = &self.g[j * dd..(j + 1) * dd];
                let h = dot4(gi, gj);
                self.hess[i * m + j] = h;
                self.hess[j * m + i] = h;
            }
        }
    }

    /// Solves `H dx = -g` by Jacobi-scaled Cholesky and checks the normwise
    /// backward error of the result.
    fn newton_direction(&mut self, residual_tol: f64) -> bool {
        let m = self.m;
        for i in 0..m {
            let h = self.hess[i * m + i];
            if !(h > 0.0) || !h.is_finite() {
                return false;
            }
            self.scale[i] = 1.0 / h.sqrt();
        }
        for i in 0..m {
            for j in 0..m {
                self.chol[i * m + j] = self.hess[i * m + j] * self.scale[i] * self.scale[j];
            }
        }
        // In-place lower Cholesky of the scaled Hessian.
        let a = &mut self.chol;
        for j in 0..m {
            let row_j = &a[j * m..j * m + j];
            let diag = a[j * m + j] - dot4(row_j, row_j);
            if !(diag > 0.0) {
                return false;
            }
            let ljj = diag.sqrt();
            a[j * m + j] = ljj;
            for i in j + 1..m {
                let v = a[i * m + j] - dot4(&a[i * m..i * m + j], &a[j * m..j * m + j]);
                a[i * m + j] = v / ljj;
            }
        }
        for i in 0..m {
            let mut v = -self.grad[i] * self.scale[i];
            for k in 0..i {
                v -= a[i * m + k] * self.rhs[k];
            }
            self.rhs[i] = v / a[i * m + i];
        }
        for i in (0..m).rev() {
            let mut v = self.rhs[i];
            for k in i + 1..m {
                v -= a[k * m + i] * self.dx[k];
            }
            self.dx[i] = v / a[i * m + i];
        }
        for i in 0..m {
            self.dx[i] *= self.scale[i];
        }

        let mut res = 0.0f64;
        let mut h_norm = 0.0f64;
        for i in 0..m {
            let mut r = self.grad[i];
            let mut row = 0.0;
            for j in 0..m {
                r += self.hess[i * m + j] * self.dx[j];
                row += self.hess[i * m + j].abs();
            }
            res = res.max(r.abs());
            h_norm = h_norm.max(row);
        }
        let dx_norm = self.dx.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let g_norm = self.grad.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let denom = h_norm * dx_norm + g_norm;
        denom == 0.0 || res <= residual_tol * denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{numerical_rank, Projector};
    use crate::local_space::Model;

    fn cayley_solve(c: &[f64]) -> SdpSolution {
        minimize(&LmiSpectrahedron::cayley_cubic(), c, &SdpOptions::default()).unwrap()
    }

    #[test]
    fn cayley_vertex() {
        let k = 1.0 / 3f64.sqrt();
        let sol = cayley_solve(&[-k, -k, -k]);
        assert_eq!(sol.status, SolveStatus::Converged);
        for v in &sol.x_star {
            assert!((v - 1.0).abs() < 1e-8, "{:?}", sol.x_star);
        }
        assert_eq!(numerical_rank(&sol.optimum_matrix, 1e-6).unwrap(), 1);
        assert!(sol.gap_bound <= 1e-9);
    }

    #[test]
    fn cayley_cap_direction_reaches_same_vertex() {
        let c = [-1.0, -0.8, -1.1];
        let sol = cayley_solve(&c);
        for v in &sol.x_star {
            assert!((v - 1.0).abs() < 1e-7, "{:?}", sol.x_star);
        }
    }

    #[test]
    fn sandwich_and_monotone_stages() {
        let k = 1.0 / 3f64.sqrt();
        for signs in [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ] {
            let c: Vec<f64> = signs.iter().map(|s| -s * k).collect();
            let sol = cayley_solve(&c);
            let opt = -3.0 * k;
            assert!(sol.objective - sol.gap_bound <= opt + 1e-8);
            assert!(opt <= sol.objective + 1e-8);
            for w in sol.stage_objectives.windows(2) {
                assert!(w[1] <= w[0], "{:?}", sol.stage_objectives);
            }
        }
    }

    #[test]
    fn residuals_of_converged_solve() {
        let s = LmiSpectrahedron::cayley_cubic();
        let sol = minimize(&s, &[-0.3, -0.5, 0.2], &SdpOptions::default()).unwrap();
        let (feas, stat) = dual_residuals(&s, &sol).unwrap();
        assert!(feas <= 1e-9);
        assert!(stat <= 1e-6);
    }

    #[test]
    fn capped_solution_has_finite_residuals() {
        let s = LmiSpectrahedron::cayley_cubic();
        let opts = SdpOptions {
            max_outer: 2,
            ..Default::default()
        };
        let sol = minimize(&s, &[-1.0, 0.0, 0.0], &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::IterationCap);
        let (feas, stat) = dual_residuals(&s, &sol).unwrap();
        assert!(feas.is_finite() && stat.is_finite());
    }

    #[test]
    fn rejects_bad_input() {
        let s = LmiSpectrahedron::cayley_cubic();
        let opts = SdpOptions::default();
        assert!(matches!(
            minimize(&s, &[0.0; 3], &opts),
            Err(Error::ZeroObjective)
        ));
        assert!(matches!(
            minimize(&s, &[1.0; 2], &opts),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = SdpOptions {
            mu: 1.0,
            ..Default::default()
        };
        assert!(minimize(&s, &[1.0; 3], &bad).is_err());
    }

    #[test]
    fn classical_edge_direction_hits_edge_matrix() {
        let s = LmiSpectrahedron::from_local_space(&Model::C3Qubit.basis()).unwrap();
        let p_prime = Projector::from_basis_states(8, [0, 7]).matrix;
        let target = &p_prime.scale(4.0) - &HermitianMatrix::identity(8);
        let c: Vec<f64> = s
            .coordinates(&p_prime)
            .unwrap()
            .iter()
            .map(|v| -v)
            .collect();
        let sol = minimize(&s, &c, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!(
            sol.optimum_matrix
                .max_abs_diff(&(&target + &HermitianMatrix::identity(8)))
                < 1e-6
        );
        assert_eq!(numerical_rank(&sol.optimum_matrix, 1e-6).unwrap(), 2);
    }

    #[test]
    fn deterministic_and_scale_invariant() {
        let s = LmiSpectrahedron::from_local_space(&Model::C3Qubit.basis()).unwrap();
        let c: Vec<f64> = (0..36).map(|i| ((i * 7 % 11) as f64 - 5.0) / 7.0).collect();
        let a = minimize(&s, &c, &SdpOptions::default()).unwrap();
        let b = minimize(&s, &c, &SdpOptions::default()).unwrap();
        assert_eq!(a.x_star, b.x_star);
        let c2: Vec<f64> = c.iter().map(|v| 2.0 * v).collect();
        let b2 = minimize(&s, &c2, &SdpOptions::default()).unwrap();
        let diff = a
            .x_star
            .iter()
            .zip(&b2.x_star)
            .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        assert!(diff < 1e-6, "{diff}");
    }
}
