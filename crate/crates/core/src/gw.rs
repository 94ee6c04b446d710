//! The Goemans-Williamson bound for maxcut(G_n), its symmetry-reduced dual,
//! and dual-feasibility certificates.
//!
//! The GW dual is min sum(w) with Diag(w) - L/4 psd; any feasible w is an
//! upper bound on maxcut, hence C(n,4) - sum(w) lower-bounds nu2(K_n). For
//! odd n the dihedral symmetry of G_n collapses the dual to d-1 variables
//! (one per chord orbit) with d+1 Hermitian blocks of size d-1 built from
//! the DFT of the circulant adjacency blocks:
//!
//!   GW(G_n) = min { n * sum_{i=2..d} y_i :
//!                   Diag(y - val/4) + Lambda^(m) psd, 0 <= m <= d }.
//!
//! Certificates carry y only; verification rebuilds every block and
//! recomputes minimum eigenvalues from scratch.

use crate::circle::ChordGraph;
use crate::hermitian::{circulant_block_eigs, tol_eig, HermitianMat};
use crate::sdp::{self, BlockEntry, ConicProblem, PsdBlock, SolveOptions};
use crate::{binomial, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest graph gw_full will solve densely.
pub const GW_FULL_MAX_VERTICES: usize = 130;

/// Data of the symmetry-reduced GW dual for odd n. Lambda blocks are
/// generated on demand; at n = 899 the 450 blocks of size 448 would not fit
/// in memory all at once.
#[derive(Debug, Clone)]
pub struct ReducedGwProblem {
    n: u32,
    d: u32,
    val: Vec<f64>,
}

impl ReducedGwProblem {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// d = floor(n/2); variables are indexed by distances 2..=d.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn block_dim(&self) -> usize {
        (self.d - 1) as usize
    }

    /// Frequencies 0..=d; m and n-m give conjugate (spectrally equal) blocks.
    pub fn num_frequencies(&self) -> usize {
        (self.d + 1) as usize
    }

    /// Orbit valencies val_i = i(i-1) + 2(i-1)(d-i), i = 2..=d.
    pub fn val(&self) -> &[f64] {
        &self.val
    }

    /// Lambda^(m): quarter of the DFT of the circulant adjacency blocks,
    /// Hermitian-completed.
    pub fn lambda_block(&self, m: u32) -> HermitianMat {
        let dim = self.block_dim();
        HermitianMat::from_fn_upper(dim, |bi, bj| {
            let (i, j) = ((bi + 2) as u32, (bj + 2) as u32);
            circulant_block_eigs(i, j, self.n, m).expect("indices in range") * 0.25
        })
    }

    /// Constraint matrix Diag(y - val/4) + Lambda^(m) at the given y.
    pub fn constraint_block(&self, y: &[f64], m: u32) -> HermitianMat {
        let mut block = self.lambda_block(m);
        let shift: Vec<f64> = y
            .iter()
            .zip(&self.val)
            .map(|(yi, vi)| yi - vi / 4.0)
            .collect();
        block.add_to_diag(&shift);
        block
    }
}

/// Assembles the reduced problem data for odd n >= 5.
pub fn build_reduced(n: u32) -> Result<ReducedGwProblem> {
    if n % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "the symmetry reduction is derived for odd n only, got {n}"
        )));
    }
    if n < 5 {
        return Err(Error::InvalidParameter(format!("need n >= 5, got {n}")));
    }
    let d = n / 2;
    let val = (2..=d)
        .map(|i| (i * (i - 1) + 2 * (i - 1) * (d - i)) as f64)
        .collect();
    Ok(ReducedGwProblem { n, d, val })
}

/// Dual-feasible certificate for the reduced GW problem.
///
/// JSON: `{"kind": "gw", "n": ..., "y": [...], "claimed_bound": ...,
/// "tolerance": ...}`. `claimed_bound = n * sum(y)` upper-bounds GW(G_n)
/// whenever every constraint block is psd, which [`verify_gw_certificate`]
/// rechecks from scratch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GwCertificate {
    pub kind: String,
    pub n: u32,
    pub y: Vec<f64>,
    pub claimed_bound: f64,
    pub tolerance: f64,
}

impl GwCertificate {
    pub fn new(n: u32, y: Vec<f64>, claimed_bound: f64, tolerance: f64) -> GwCertificate {
        GwCertificate {
            kind: "gw".into(),
            n,
            y,
            claimed_bound,
            tolerance,
        }
    }

    /// Worst minimum eigenvalue over all constraint blocks, recomputed.
    pub fn margin(&self) -> Result<f64> {
        let p = build_reduced(self.n)?;
        if self.y.len() != p.block_dim() {
            return Err(Error::BadCertificate(format!(
                "y has length {}, expected {}",
                self.y.len(),
                p.block_dim()
            )));
        }
        let mut margin = f64::INFINITY;
        for m in 0..=p.d() {
            margin = margin.min(p.constraint_block(&self.y, m).min_eigenvalue());
        }
        Ok(margin)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<GwCertificate> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Result of a reduced solve: a safe-rounded certificate plus whether the
/// solver reached its accuracy target (the certificate is sound either way).
#[derive(Debug, Clone)]
pub struct GwSolve {
    pub certificate: GwCertificate,
    pub converged: bool,
}

/// GW(G) for an explicit chord graph via the dense dual
/// min sum(w) s.t. Diag(w) - L/4 psd, to ~1e-6 relative accuracy.
/// The returned value comes from a safe-rounded feasible w, so it is always
/// an upper bound on GW(G) (and on maxcut(G)).
pub fn gw_full(g: &ChordGraph) -> Result<f64> {
    let p = g.vertex_count();
    if p > GW_FULL_MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "gw_full limited to {GW_FULL_MAX_VERTICES} vertices, G_{} has {p}",
            g.n()
        )));
    }
    gw_full_laplacian(p, &g.laplacian())
}

/// Dense GW dual on an arbitrary Laplacian (possibly weighted / with an
/// apex vertex, as used by the branch-and-bound subproblems).
pub(crate) fn gw_full_laplacian(p: usize, laplacian: &[f64]) -> Result<f64> {
    let (bound, _w) = gw_full_laplacian_witness(p, laplacian, 1e-8, None)?;
    Ok(bound)
}

pub(crate) fn gw_full_laplacian_witness(
    p: usize,
    laplacian: &[f64],
    rel_gap: f64,
    time_budget: Option<std::time::Duration>,
) -> Result<(f64, Vec<f64>)> {
    if p == 0 {
        return Ok((0.0, vec![]));
    }
    let mut constant = HermitianMat::from_real(p, laplacian);
    constant.scale(-0.25);
    let radius = constant.spectral_radius_bound();
    let start = vec![radius + 1.0; p];
    let scale: f64 = start.iter().sum::<f64>().max(1.0);
    let problem = ConicProblem {
        num_vars: p,
        objective: vec![-1.0; p],
        scalars: vec![],
        blocks: vec![PsdBlock {
            constant,
            entries: (0..p)
                .map(|i| BlockEntry {
                    var: i,
                    row: i,
                    col: i,
                    coeff: Complex64::new(1.0, 0.0),
                })
                .collect(),
        }],
    };
    let opts = SolveOptions {
        target_gap: rel_gap * scale,
        time_budget,
        ..SolveOptions::default()
    };
    let sol = sdp::solve(&problem, start, &opts)?;
    let mut w = sol.v;

    // safe rounding: verify psd from scratch, lift w by any deficit
    let mut m = HermitianMat::from_real(p, laplacian);
    m.scale(-0.25);
    m.add_to_diag(&w);
    let margin = m.min_eigenvalue();
    let tol = tol_eig(m.spectral_radius_bound());
    if margin < tol {
        let delta = tol - margin;
        for wi in w.iter_mut() {
            *wi += delta;
        }
    }
    Ok((w.iter().sum(), w))
}

/// Solves the reduced GW dual for odd n and returns a safe-rounded
/// certificate. `accuracy` is the absolute target on the bound n * sum(y).
pub fn gw_reduced_solve(p: &ReducedGwProblem, accuracy: f64) -> Result<GwSolve> {
    let k = p.block_dim();
    let n = p.n();
    let mut blocks = Vec::with_capacity(p.num_frequencies());
    let mut worst_radius: f64 = 0.0;
    for m in 0..=p.d() {
        let lambda = p.lambda_block(m);
        worst_radius = worst_radius.max(lambda.spectral_radius_bound());
        let mut constant = lambda;
        let shift: Vec<f64> = p.val().iter().map(|v| -v / 4.0).collect();
        constant.add_to_diag(&shift);
        blocks.push(PsdBlock {
            constant,
            entries: (0..k)
                .map(|i| BlockEntry {
                    var: i,
                    row: i,
                    col: i,
                    coeff: Complex64::new(1.0, 0.0),
                })
                .collect(),
        });
    }
    let start: Vec<f64> = p
        .val()
        .iter()
        .map(|v| v / 4.0 + worst_radius + 1.0)
        .collect();
    let problem = ConicProblem {
        num_vars: k,
        objective: vec![-1.0; k],
        scalars: vec![],
        blocks,
    };
    let opts = SolveOptions {
        target_gap: (accuracy / (2.0 * n as f64)).max(1e-13),
        ..SolveOptions::default()
    };
    let sol = sdp::solve(&problem, start, &opts)?;
    let mut y = sol.v;

    // safe rounding: recompute all block margins, lift y by the deficit
    let mut margin = f64::INFINITY;
    let mut tol: f64 = 0.0;
    for m in 0..=p.d() {
        let block = p.constraint_block(&y, m);
        tol = tol.max(tol_eig(block.spectral_radius_bound()));
        margin = margin.min(block.min_eigenvalue());
    }
    if margin < tol {
        let delta = tol - margin;
        for yi in y.iter_mut() {
            *yi += delta;
        }
    }
    let bound = n as f64 * y.iter().sum::<f64>();
    Ok(GwSolve {
        certificate: GwCertificate::new(n, y, bound, tol),
        converged: sol.converged,
    })
}

/// Outcome of verifying a GW certificate from scratch.
#[derive(Debug, Clone, Serialize)]
pub struct GwVerification {
    pub valid: bool,
    pub reason: Option<String>,
    /// Worst recomputed block margin.
    pub margin: f64,
    /// Certified upper bound on GW(G_n) including the eigenvalue-tolerance
    /// safety term.
    pub gw_upper_bound: f64,
    /// ceil(C(n,4) - gw_upper_bound): the certified lower bound on nu2(K_n).
    pub implied_nu2_lower: Option<u64>,
}

fn invalid(reason: String) -> GwVerification {
    GwVerification {
        valid: false,
        reason: Some(reason),
        margin: f64::NEG_INFINITY,
        gw_upper_bound: f64::INFINITY,
        implied_nu2_lower: None,
    }
}

/// Recomputes every block's minimum eigenvalue from scratch and accepts the
/// certificate iff all margins are >= -tol. The implied nu2(K_n) lower bound
/// subtracts the eigenvalue-tolerance slack before the final ceiling, so it
/// stays valid even at the accuracy limit.
pub fn verify_gw_certificate(c: &GwCertificate) -> GwVerification {
    if c.kind != "gw" {
        return invalid(format!("kind is {:?}, expected \"gw\"", c.kind));
    }
    let p = match build_reduced(c.n) {
        Ok(p) => p,
        Err(e) => return invalid(e.to_string()),
    };
    if c.y.len() != p.block_dim() {
        return invalid(format!(
            "y has length {}, expected {} for n = {}",
            c.y.len(),
            p.block_dim(),
            c.n
        ));
    }
    if !c.y.iter().all(|v| v.is_finite()) || !c.claimed_bound.is_finite() {
        return invalid("non-finite entries".into());
    }

    let sum_y: f64 = c.y.iter().sum();
    let recomputed = c.n as f64 * sum_y;
    if (recomputed - c.claimed_bound).abs() > 1e-6 * (1.0 + c.claimed_bound.abs()) {
        return invalid(format!(
            "claimed bound {} does not match n * sum(y) = {recomputed}",
            c.claimed_bound
        ));
    }

    let mut margin = f64::INFINITY;
    let mut tol = c.tolerance.max(0.0);
    for m in 0..=p.d() {
        let block = p.constraint_block(&c.y, m);
        tol = tol.max(tol_eig(block.spectral_radius_bound()));
        margin = margin.min(block.min_eigenvalue());
    }
    if margin < -tol {
        return invalid(format!(
            "constraint block has eigenvalue {margin:.3e} below -{tol:.3e}"
        ));
    }

    // margins >= -tol and eigenvalues known to +-tol, so y + 2 tol is truly
    // feasible: GW <= n * (sum y + (d-1) * 2 tol).
    let slack = 2.0 * tol * c.n as f64 * p.block_dim() as f64;
    let gw_ub = recomputed + slack;
    let e_n = binomial(c.n as u64, 4) as f64;
    let implied = (e_n - gw_ub).ceil().max(0.0) as u64;
    GwVerification {
        valid: true,
        reason: None,
        margin,
        gw_upper_bound: gw_ub,
        implied_nu2_lower: Some(implied),
    }
}
