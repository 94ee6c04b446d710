//! Internal barrier-method solver for the conic programs used by the GW and
//! bipartite bounds:
//!
//!   maximize c.v  subject to  a_r.v + b_r >= 0  (scalars)
//!                             M_B(v) = C_B + sum_u v_u A_{B,u} psd (blocks)
//!
//! Classic log-barrier path following with exact Hermitian block
//! factorizations. Every iterate is strictly feasible, so any returned point
//! yields a sound bound even without convergence; callers safe-round on top.
//! Newton systems are solved densely for small variable counts and by
//! preconditioned conjugate gradients (matrix-free Hessian products) for
//! large ones.

use crate::hermitian::HermitianMat;
use crate::{Error, Result};
use num_complex::Complex64;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub(crate) struct ScalarConstraint {
    /// (variable, coefficient) terms of a_r.v + b_r >= 0.
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockEntry {
    pub var: usize,
    /// row <= col; the variable contributes coeff at (row,col) and its
    /// conjugate at (col,row). Diagonal coefficients must be real.
    pub row: usize,
    pub col: usize,
    pub coeff: Complex64,
}

#[derive(Debug, Clone)]
pub(crate) struct PsdBlock {
    pub constant: HermitianMat,
    pub entries: Vec<BlockEntry>,
}

#[derive(Debug, Clone)]
pub(crate) struct ConicProblem {
    pub num_vars: usize,
    /// Maximized objective.
    pub objective: Vec<f64>,
    pub scalars: Vec<ScalarConstraint>,
    pub blocks: Vec<PsdBlock>,
}

#[derive(Debug, Clone)]
pub(crate) struct SolveOptions {
    /// Target duality-gap bound nu/tau (absolute, objective scale).
    pub target_gap: f64,
    pub max_newton_per_stage: usize,
    pub tau_factor: f64,
    pub time_budget: Option<Duration>,
    /// None: choose by variable count.
    pub use_cg: Option<bool>,
    pub cg_max_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            target_gap: 1e-8,
            max_newton_per_stage: 400,
            tau_factor: 5.0,
            time_budget: None,
            use_cg: None,
            cg_max_iters: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ConicSolution {
    pub v: Vec<f64>,
    pub converged: bool,
}

struct Evaluated {
    slacks: Vec<f64>,
    /// Inverse of each PSD block at the current point.
    inverses: Vec<HermitianMat>,
    log_dets: Vec<f64>,
}

/// Per-block expansion of the variables' elementary coefficients:
/// (coeff, a, b) meaning coeff * E_{ab}.
type Expanded = Vec<Vec<(Complex64, usize, usize)>>;

pub(crate) fn solve(
    problem: &ConicProblem,
    start: Vec<f64>,
    opts: &SolveOptions,
) -> Result<ConicSolution> {
    let k = problem.num_vars;
    assert_eq!(start.len(), k);
    assert_eq!(problem.objective.len(), k);

    let nu: f64 = problem.scalars.len() as f64
        + problem.blocks.iter().map(|b| b.constant.dim() as f64).sum::<f64>();
    let use_cg = opts.use_cg.unwrap_or(k > 3000);

    // expanded coefficient lists and touched-variable lists per block
    let mut expansions: Vec<Expanded> = Vec::with_capacity(problem.blocks.len());
    let mut touched: Vec<Vec<usize>> = Vec::with_capacity(problem.blocks.len());
    for block in &problem.blocks {
        let mut exp: Expanded = vec![Vec::new(); k];
        let mut vars = Vec::new();
        for e in &block.entries {
            if exp[e.var].is_empty() {
                vars.push(e.var);
            }
            exp[e.var].push((e.coeff, e.row, e.col));
            if e.row != e.col {
                exp[e.var].push((e.coeff.conj(), e.col, e.row));
            }
        }
        vars.sort_unstable();
        expansions.push(exp);
        touched.push(vars);
    }

    let deadline = opts.time_budget.map(|b| Instant::now() + b);
    let mut v = start;
    match evaluate(problem, &v) {
        Some(_) => {}
        None => {
            return Err(Error::Numerical(
                "barrier start point is not strictly feasible".into(),
            ))
        }
    }

    let mut tau = 1.0f64;
    let mut tau_factor = opts.tau_factor;
    let mut gap_bound = f64::INFINITY;
    let mut converged = false;

    loop {
        let mut centered = false;
        let mut last_lambda = 0.01f64;
        let mut stage_newtons = 0usize;
        for _ in 0..opts.max_newton_per_stage {
            if let Some(d) = deadline {
                if Instant::now() > d {
                    break;
                }
            }
            stage_newtons += 1;
            let eval = match evaluate(problem, &v) {
                Some(e) => e,
                None => return Err(Error::Numerical("barrier iterate left the cone".into())),
            };
            let grad = gradient(problem, &eval, &expansions, &touched, tau);
            let dir = if use_cg {
                newton_dir_cg(problem, &eval, &expansions, &touched, &grad, opts.cg_max_iters)
            } else {
                newton_dir_dense(problem, &eval, &expansions, &touched, &grad)
            };
            let decrement2: f64 = -grad.iter().zip(&dir).map(|(g, d)| g * d).sum::<f64>();
            if !decrement2.is_finite() {
                return Err(Error::Numerical("Newton decrement not finite".into()));
            }

            // lambda <= 0.01 is centered enough: the reported gap accounts
            // for it below as (nu + lambda sqrt(nu)) / tau
            if std::env::var("SDP_DEBUG").is_ok() {
                eprintln!("tau={tau:.1e} dec2={decrement2:.3e}");
            }
            if decrement2 <= 1e-4 {
                centered = true;
                last_lambda = decrement2.max(0.0).sqrt();
                break;
            }
            let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            let obj_dir: f64 = problem.objective.iter().zip(&dir).map(|(c, d)| c * d).sum();
            // damped Newton step: 1/(1+lambda) keeps the iterate inside the
            // Dikin ellipsoid, so it cannot crash into the cone boundary
            let lambda = decrement2.max(0.0).sqrt();
            let mut alpha = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut accepted = false;
            for _ in 0..80 {
                let trial: Vec<f64> = v.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
                if let Some(te) = evaluate(problem, &trial) {
                    // f(trial) - f(v) evaluated as a difference to avoid
                    // cancellation against the huge tau * objective term
                    let mut df = -tau * alpha * obj_dir;
                    for (s0, s1) in eval.slacks.iter().zip(&te.slacks) {
                        df -= s1.ln() - s0.ln();
                    }
                    for (l0, l1) in eval.log_dets.iter().zip(&te.log_dets) {
                        df -= l1 - l0;
                    }
                    if df <= 0.25 * alpha * slope {
                        v = trial;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // stuck at numerical precision for this stage
                centered = true;
                last_lambda = lambda.min(1.0);
                break;
            }
        }
        if centered {
            gap_bound = (nu + last_lambda * nu.sqrt()) / tau;
        }
        if gap_bound <= opts.target_gap {
            converged = true;
            break;
        }
        if let Some(d) = deadline {
            if Instant::now() > d {
                break;
            }
        }
        if tau > 1e18 {
            break;
        }
        // adapt the jump to how hard the last centering was: easy stages
        // earn bigger jumps, crawls get gentler ones
        if stage_newtons <= 12 {
            tau_factor = (tau_factor * 2.0).min(16.0);
        } else if stage_newtons >= 60 {
            tau_factor = (tau_factor / 2.0).max(2.0);
        }
        tau *= tau_factor;
    }

    Ok(ConicSolution { v, converged })
}

fn assemble_block(problem: &ConicProblem, b: usize, v: &[f64]) -> HermitianMat {
    let block = &problem.blocks[b];
    let mut m = block.constant.clone();
    for e in &block.entries {
        let add = e.coeff * v[e.var];
        let cur = m.get(e.row, e.col);
        m.set_upper(e.row, e.col, cur + add);
    }
    m
}

fn evaluate(problem: &ConicProblem, v: &[f64]) -> Option<Evaluated> {
    let mut slacks = Vec::with_capacity(problem.scalars.len());
    for s in &problem.scalars {
        let val = s.constant + s.terms.iter().map(|&(u, c)| c * v[u]).sum::<f64>();
        if !(val > 0.0) {
            return None;
        }
        slacks.push(val);
    }
    let mut inverses = Vec::with_capacity(problem.blocks.len());
    let mut log_dets = Vec::with_capacity(problem.blocks.len());
    for b in 0..problem.blocks.len() {
        let m = assemble_block(problem, b, v);
        let ch = m.cholesky()?;
        log_dets.push(ch.log_det());
        inverses.push(ch.inverse());
    }
    Some(Evaluated {
        slacks,
        inverses,
        log_dets,
    })
}

fn gradient(
    problem: &ConicProblem,
    eval: &Evaluated,
    expansions: &[Expanded],
    touched: &[Vec<usize>],
    tau: f64,
) -> Vec<f64> {
    let mut g: Vec<f64> = problem.objective.iter().map(|c| -tau * c).collect();
    for (s, slack) in problem.scalars.iter().zip(&eval.slacks) {
        for &(u, c) in &s.terms {
            g[u] -= c / slack;
        }
    }
    for (b, vars) in touched.iter().enumerate() {
        let w = &eval.inverses[b];
        for &u in vars {
            let mut t = 0.0;
            for &(alpha, a, bb) in &expansions[b][u] {
                t += (alpha * w.get(bb, a)).re;
            }
            g[u] -= t;
        }
    }
    g
}

fn hessian_pair(
    w: &HermitianMat,
    eu: &[(Complex64, usize, usize)],
    ev: &[(Complex64, usize, usize)],
) -> f64 {
    // Re tr(W A_u W A_v) with A = sum of elementary coeff * E_{ab}:
    // tr(W E_{ab} W E_{cd}) = W[d][a] * W[b][c]
    let mut acc = Complex64::new(0.0, 0.0);
    for &(alpha, a, b) in eu {
        for &(beta, c, d) in ev {
            acc += alpha * beta * w.get(d, a) * w.get(b, c);
        }
    }
    acc.re
}

fn newton_dir_dense(
    problem: &ConicProblem,
    eval: &Evaluated,
    expansions: &[Expanded],
    touched: &[Vec<usize>],
    grad: &[f64],
) -> Vec<f64> {
    let k = problem.num_vars;
    let mut h = vec![0.0f64; k * k];
    for (s, slack) in problem.scalars.iter().zip(&eval.slacks) {
        let inv2 = 1.0 / (slack * slack);
        for &(u, cu) in &s.terms {
            for &(vv, cv) in &s.terms {
                h[u * k + vv] += cu * cv * inv2;
            }
        }
    }
    for (b, vars) in touched.iter().enumerate() {
        let w = &eval.inverses[b];
        for (iu, &u) in vars.iter().enumerate() {
            for &vv in &vars[iu..] {
                let val = hessian_pair(w, &expansions[b][u], &expansions[b][vv]);
                h[u * k + vv] += val;
                if u != vv {
                    h[vv * k + u] += val;
                }
            }
        }
    }
    solve_spd_system(&mut h, k, grad)
}

/// Solves H d = -grad for a (numerically) positive semidefinite H. The
/// system is Jacobi-equilibrated first; if Cholesky still breaks down (the
/// near-boundary Hessians are rank-one dominated), falls back to an
/// eigendecomposition with a floored spectrum. Either way the returned
/// direction is a descent direction for the barrier.
fn solve_spd_system(h: &mut [f64], k: usize, grad: &[f64]) -> Vec<f64> {
    let mut scale = vec![1.0f64; k];
    for i in 0..k {
        let d = h[i * k + i];
        scale[i] = if d > 0.0 { d.sqrt() } else { 1.0 };
    }
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] /= scale[i] * scale[j];
        }
    }
    let rhs: Vec<f64> = (0..k).map(|i| -grad[i] / scale[i]).collect();

    let mut trial = h.to_vec();
    if let Some(mut y) = real_chol_solve(&mut trial, k, &rhs) {
        for i in 0..k {
            y[i] /= scale[i];
        }
        return y;
    }

    // modified Newton: floor the equilibrated spectrum
    let hm = HermitianMat::from_fn_upper(k, |i, j| Complex64::new(h[i * k + j], 0.0));
    let (eigs, vecs) = hm.eigen_decomposition();
    let emax = eigs.iter().cloned().fold(1e-300, f64::max);
    let floor = emax * 1e-12;
    let mut y = vec![0.0f64; k];
    for t in 0..k {
        let mut proj = 0.0;
        for i in 0..k {
            proj += vecs[i * k + t].re * rhs[i];
        }
        let lam = eigs[t].max(floor);
        let coeff = proj / lam;
        for i in 0..k {
            y[i] += coeff * vecs[i * k + t].re;
        }
    }
    for i in 0..k {
        y[i] /= scale[i];
    }
    y
}

/// In-place real symmetric Cholesky solve; returns None if not PD.
fn real_chol_solve(h: &mut [f64], k: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    for j in 0..k {
        let mut d = h[j * k + j];
        for l in 0..j {
            d -= h[j * k + l] * h[j * k + l];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        h[j * k + j] = dj;
        for i in (j + 1)..k {
            let mut v = h[i * k + j];
            for l in 0..j {
                v -= h[i * k + l] * h[j * k + l];
            }
            h[i * k + j] = v / dj;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..k {
        for l in 0..i {
            y[i] = y[i] - h[i * k + l] * y[l];
        }
        y[i] /= h[i * k + i];
    }
    for i in (0..k).rev() {
        for l in (i + 1)..k {
            y[i] = y[i] - h[l * k + i] * y[l];
        }
        y[i] /= h[i * k + i];
    }
    Some(y)
}

fn hessian_matvec(
    problem: &ConicProblem,
    eval: &Evaluated,
    expansions: &[Expanded],
    touched: &[Vec<usize>],
    x: &[f64],
    out: &mut [f64],
) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (s, slack) in problem.scalars.iter().zip(&eval.slacks) {
        let dot: f64 = s.terms.iter().map(|&(u, c)| c * x[u]).sum();
        let scaled = dot / (slack * slack);
        for &(u, c) in &s.terms {
            out[u] += c * scaled;
        }
    }
    for (b, vars) in touched.iter().enumerate() {
        let w = &eval.inverses[b];
        let dim = w.dim();
        // V = sum_u x_u A_u
        let mut vmat = HermitianMat::zeros(dim);
        for &u in vars {
            if x[u] == 0.0 {
                continue;
            }
            for &(alpha, a, bb) in &expansions[b][u] {
                if a <= bb {
                    let cur = vmat.get(a, bb);
                    vmat.set_upper(a, bb, cur + alpha * x[u]);
                }
            }
        }
        // T = W V W
        let t = sandwich(w, &vmat);
        for &u in vars {
            let mut acc = 0.0;
            for &(alpha, a, bb) in &expansions[b][u] {
                acc += (alpha * t.get(bb, a)).re;
            }
            out[u] += acc;
        }
    }
}

/// W V W for Hermitian W, V.
fn sandwich(w: &HermitianMat, v: &HermitianMat) -> HermitianMat {
    let n = w.dim();
    // P = W V
    let mut p = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for l in 0..n {
            let wil = w.get(i, l);
            if wil.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                p[i * n + j] += wil * v.get(l, j);
            }
        }
    }
    HermitianMat::from_fn_upper(n, |i, j| {
        let mut s = Complex64::new(0.0, 0.0);
        for l in 0..n {
            s += p[i * n + l] * w.get(l, j);
        }
        s
    })
}

fn newton_dir_cg(
    problem: &ConicProblem,
    eval: &Evaluated,
    expansions: &[Expanded],
    touched: &[Vec<usize>],
    grad: &[f64],
    max_iters: usize,
) -> Vec<f64> {
    let k = problem.num_vars;
    // Jacobi preconditioner: diagonal of the Hessian
    let mut diag = vec![0.0f64; k];
    for (s, slack) in problem.scalars.iter().zip(&eval.slacks) {
        let inv2 = 1.0 / (slack * slack);
        for &(u, c) in &s.terms {
            diag[u] += c * c * inv2;
        }
    }
    for (b, vars) in touched.iter().enumerate() {
        let w = &eval.inverses[b];
        for &u in vars {
            diag[u] += hessian_pair(w, &expansions[b][u], &expansions[b][u]);
        }
    }
    for d in diag.iter_mut() {
        if *d <= 0.0 {
            *d = 1.0;
        }
    }

    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let rhs_norm = rhs.iter().map(|x| x * x).sum::<f64>().sqrt() + 1e-300;
    let mut x = vec![0.0f64; k];
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut hp = vec![0.0f64; k];
    for _ in 0..max_iters {
        let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rnorm <= 1e-9 * rhs_norm {
            break;
        }
        hessian_matvec(problem, eval, expansions, touched, &p, &mut hp);
        let php: f64 = p.iter().zip(&hp).map(|(a, b)| a * b).sum();
        if php <= 0.0 || !php.is_finite() {
            break;
        }
        let alpha = rz / php;
        for i in 0..k {
            x[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        for i in 0..k {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}
