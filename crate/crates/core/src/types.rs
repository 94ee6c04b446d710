//! Types(m), the forced-crossing matrix Q, its circulant orbit structure,
//! and certified lower bounds on SDP_bound(m).
//!
//! A red vertex of a K_{m,n} drawing has a type (p, U): position among the
//! blue vertices and the set of blue indices reached on the upper page.
//! Two types force a number of crossings between their stars (the bracket
//! [sigma,tau]); collecting those into the m2^m x m2^m matrix Q turns
//! crossing minimization into the standard quadratic program
//! min x'Qx over the simplex, whose SDP relaxation
//!
//!   SDP_bound(m) = max { t : Q - tJ = S1 + S2, S1 psd, S2 >= 0 }
//!
//! lower-bounds nu2(K_{m,n}) through nu2 >= (t/2) n^2 - m(m-1)n/4.
//!
//! For odd m the group generated by page flip and cyclic relabeling is
//! cyclic of order 2m and acts freely, so reordering Q by orbits gives
//! 2^{m-1} x 2^{m-1} blocks of 2m x 2m circulants; S1 restricted to that
//! algebra reduces the SDP to the x-vectors of the circulant first rows
//! with one 2^{m-1}-dimensional Hermitian block per DFT frequency.

use crate::drawing::RedType;
use crate::hermitian::{tol_eig, HermitianMat};
use crate::sdp::{self, BlockEntry, ConicProblem, PsdBlock, ScalarConstraint, SolveOptions};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Page flip g1: (p, U) -> (p, complement of U).
pub fn flip(t: RedType, m: u32) -> RedType {
    RedType {
        p: t.p,
        upper: !t.upper & ((1u16 << m) - 1),
    }
}

/// Cyclic relabeling g2: (p, U) -> (p+1 mod m, U+1 mod m).
pub fn cyclic_shift(t: RedType, m: u32) -> RedType {
    let mask = (1u16 << m) - 1;
    let shifted = ((t.upper << 1) | (t.upper >> (m - 1))) & mask;
    RedType {
        p: ((t.p as u32 + 1) % m) as u8,
        upper: shifted,
    }
}

/// g = g1 ∘ g2, a generator of the whole group when m is odd (order 2m).
pub fn g_step(t: RedType, m: u32) -> RedType {
    flip(cyclic_shift(t, m), m)
}

/// Enumeration of Types(m) with its orbit decomposition.
#[derive(Debug, Clone)]
pub struct TypeTable {
    m: u32,
    /// orbit id of every type index
    orbit_of: Vec<u32>,
    /// member type indices per orbit; for odd m in g-power order from the
    /// lexicographically minimal representative
    orbits: Vec<Vec<usize>>,
}

impl TypeTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn type_count(&self) -> usize {
        (self.m as usize) << self.m
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, type_index: usize) -> usize {
        self.orbit_of[type_index] as usize
    }

    pub fn type_at(&self, index: usize) -> RedType {
        RedType::from_index(index, self.m)
    }

    pub fn representative(&self, orbit: usize) -> RedType {
        self.type_at(self.orbits[orbit][0])
    }
}

/// Lexicographic key (p, sorted U) used to pick orbit representatives.
fn lex_key(t: RedType, m: u32) -> (u8, Vec<u32>) {
    let bits = (0..m).filter(|k| t.upper >> k & 1 == 1).collect();
    (t.p, bits)
}

/// Enumerates Types(m) and decomposes it under the flip/shift group.
/// Guarded to 2 <= m <= 9: Q takes (m 2^m)^2 entries.
pub fn build_type_table(m: u32) -> Result<TypeTable> {
    if !(2..=9).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "type table supported for 2 <= m <= 9, got {m}"
        )));
    }
    let count = (m as usize) << m;
    let mut orbit_of = vec![u32::MAX; count];
    let mut member_sets: Vec<Vec<usize>> = Vec::new();

    if m % 2 == 1 {
        // the cyclic generator g covers the whole group
        for start in 0..count {
            if orbit_of[start] != u32::MAX {
                continue;
            }
            let mut members = Vec::with_capacity(2 * m as usize);
            let mut t = RedType::from_index(start, m);
            loop {
                let idx = t.index(m);
                if orbit_of[idx] != u32::MAX {
                    break;
                }
                orbit_of[idx] = member_sets.len() as u32;
                members.push(idx);
                t = g_step(t, m);
            }
            member_sets.push(members);
        }
        // rebase each orbit to start at its lexicographically minimal member,
        // keeping g-power order
        for members in member_sets.iter_mut() {
            let min_pos = members
                .iter()
                .enumerate()
                .min_by_key(|(_, &idx)| lex_key(RedType::from_index(idx, m), m))
                .map(|(pos, _)| pos)
                .unwrap();
            members.rotate_left(min_pos);
        }
    } else {
        // even m: same group order, but not cyclic; plain closure under g1, g2
        for start in 0..count {
            if orbit_of[start] != u32::MAX {
                continue;
            }
            let oid = member_sets.len() as u32;
            let mut members = Vec::new();
            let mut stack = vec![start];
            orbit_of[start] = oid;
            while let Some(idx) = stack.pop() {
                members.push(idx);
                let t = RedType::from_index(idx, m);
                for next in [flip(t, m), cyclic_shift(t, m)] {
                    let ni = next.index(m);
                    if orbit_of[ni] == u32::MAX {
                        orbit_of[ni] = oid;
                        stack.push(ni);
                    }
                }
            }
            members.sort_by_key(|&idx| lex_key(RedType::from_index(idx, m), m));
            member_sets.push(members);
        }
    }

    // deterministic orbit order: by representative key
    let mut order: Vec<usize> = (0..member_sets.len()).collect();
    order.sort_by_key(|&o| lex_key(RedType::from_index(member_sets[o][0], m), m));
    let orbits: Vec<Vec<usize>> = order.iter().map(|&o| member_sets[o].clone()).collect();
    let mut orbit_of = vec![u32::MAX; count];
    for (oid, members) in orbits.iter().enumerate() {
        for &idx in members {
            orbit_of[idx] = oid as u32;
        }
    }
    Ok(TypeTable { m, orbit_of, orbits })
}

/// The bracket [sigma, tau]: pairs (i, j) of blue indices whose edges
/// r b_i and r' b_j are forced to cross when r (of type sigma) lies left of
/// r' (of type tau). 0-based translation of the four position cases:
///
///   (i < j <= p) or (j <= p and p' < i) or (i < j and p' < i)
///   or (p < j < i <= p'),
///
/// intersected with the same-page condition (both upper or both lower).
pub fn pair_count(sigma: RedType, tau: RedType, m: u32) -> u32 {
    let (p, pp) = (sigma.p as u32, tau.p as u32);
    let mut count = 0;
    for i in 0..m {
        let iu = sigma.upper >> i & 1 == 1;
        for j in 0..m {
            let ju = tau.upper >> j & 1 == 1;
            if iu != ju {
                continue;
            }
            let pos_ok = (i < j && j <= p)
                || (j <= p && pp < i)
                || (i < j && pp < i)
                || (p < j && j < i && i <= pp);
            if pos_ok {
                count += 1;
            }
        }
    }
    count
}

/// The symmetric forced-crossing matrix Q over Types(m), plus the circulant
/// first rows of its orbit-reordered blocks when m is odd.
#[derive(Debug, Clone)]
pub struct QMatrix {
    m: u32,
    size: usize,
    entries: Vec<u32>,
    /// q^{(i,j)} in Z^{2m} for every ordered orbit pair (i,j), row-major
    /// (odd m only).
    orbit_rows: Option<Vec<Vec<u32>>>,
}

impl QMatrix {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.size + j]
    }

    /// First row of the circulant block for the ordered orbit pair (bi, bj).
    pub fn orbit_row(&self, block_count: usize, bi: usize, bj: usize) -> Option<&[u32]> {
        self.orbit_rows
            .as_ref()
            .map(|rows| rows[bi * block_count + bj].as_slice())
    }

    pub fn max_diagonal(&self) -> u32 {
        (0..self.size).map(|i| self.get(i, i)).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds Q from the position trichotomy: [sigma,tau] if p < p',
/// [tau,sigma] if p > p', the minimum of both if p = p'.
pub fn build_q_matrix(tt: &TypeTable) -> QMatrix {
    let m = tt.m();
    let size = tt.type_count();
    let entries: Vec<u32> = (0..size)
        .into_par_iter()
        .flat_map_iter(|i| {
            let sigma = RedType::from_index(i, m);
            (0..size).map(move |j| {
                let tau = RedType::from_index(j, m);
                match sigma.p.cmp(&tau.p) {
                    std::cmp::Ordering::Less => pair_count(sigma, tau, m),
                    std::cmp::Ordering::Greater => pair_count(tau, sigma, m),
                    std::cmp::Ordering::Equal => {
                        pair_count(sigma, tau, m).min(pair_count(tau, sigma, m))
                    }
                }
            })
        })
        .collect();

    let orbit_rows = (m % 2 == 1).then(|| {
        let b = tt.orbit_count();
        let period = 2 * m as usize;
        let mut rows = Vec::with_capacity(b * b);
        for bi in 0..b {
            let rep_i = tt.orbits()[bi][0];
            for bj in 0..b {
                let row: Vec<u32> = (0..period)
                    .map(|k| entries[rep_i * size + tt.orbits()[bj][k]])
                    .collect();
                rows.push(row);
            }
        }
        rows
    });
    QMatrix {
        m,
        size,
        entries,
        orbit_rows,
    }
}

/// x'Qx for a distribution x over Types(m); rejects points off the simplex.
pub fn qp_objective(x: &[f64], q: &QMatrix) -> Result<f64> {
    if x.len() != q.size() {
        return Err(Error::InvalidParameter(format!(
            "distribution has {} entries, Types({}) has {}",
            x.len(),
            q.m(),
            q.size()
        )));
    }
    if x.iter().any(|&v| v < -1e-12) {
        return Err(Error::InvalidParameter("negative distribution entry".into()));
    }
    let sum: f64 = x.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "distribution sums to {sum}, not 1"
        )));
    }
    let mut acc = 0.0;
    for i in 0..q.size() {
        if x[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..q.size() {
            row += q.get(i, j) as f64 * x[j];
        }
        acc += x[i] * row;
    }
    Ok(acc)
}

/// Certificate for the symmetry-reduced SDP_bound(m), odd m.
///
/// JSON: `{"kind": "zar", "m": ..., "t": ..., "x_blocks": [[...], ...],
/// "tolerance": ...}`. `x_blocks` holds x^{(i,j)} for 1 <= i <= j <= 2^{m-1}
/// in row-major upper-triangle order; the (j,i) blocks are the cyclic
/// reversals required by symmetry, so they carry no extra data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZarCertificate {
    pub kind: String,
    pub m: u32,
    pub t: f64,
    pub x_blocks: Vec<Vec<f64>>,
    pub tolerance: f64,
}

/// Certificate for the unreduced SDP_bound(m) (even or small m): S1 stored
/// densely. JSON kind "zar-dense".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZarDenseCertificate {
    pub kind: String,
    pub m: u32,
    pub t: f64,
    pub s1: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl ZarCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<ZarCertificate> {
        Ok(serde_json::from_str(s)?)
    }
}

impl ZarDenseCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<ZarDenseCertificate> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Upper-triangle pair index for 0 <= i <= j < b.
fn pair_index(i: usize, j: usize, b: usize) -> usize {
    (2 * b - i + 1) * i / 2 + (j - i)
}

/// Variable layout of the reduced dual: t first, then per pair (i <= j) the
/// free entries of x^{(i,j)} (all 2m for i < j; k = 0..=m for i = j, with
/// k and 2m-k sharing a variable by the palindrome condition).
struct ReducedLayout {
    b: usize,
    /// var id per (pair, slot k), pairs in upper-triangle order
    var_of: Vec<Vec<usize>>,
    num_vars: usize,
}

impl ReducedLayout {
    fn new(m: usize, b: usize) -> ReducedLayout {
        let period = 2 * m;
        let mut var_of = Vec::new();
        let mut next = 1usize; // var 0 is t
        for i in 0..b {
            for j in i..b {
                let mut slots = vec![usize::MAX; period];
                if i == j {
                    for k in 0..=m {
                        let v = next;
                        next += 1;
                        slots[k] = v;
                        if k >= 1 && k < m {
                            slots[period - k] = v;
                        }
                    }
                } else {
                    for (k, slot) in slots.iter_mut().enumerate() {
                        *slot = next + k;
                    }
                    next += period;
                }
                var_of.push(slots);
            }
        }
        ReducedLayout {
            b,
            var_of,
            num_vars: next,
        }
    }

    fn slots(&self, i: usize, j: usize) -> &[usize] {
        &self.var_of[pair_index(i, j, self.b)]
    }
}

/// DFT phase e^{-i pi f k / m}.
fn dft_phase(f: usize, k: usize, m: usize) -> Complex64 {
    let angle = -std::f64::consts::PI * (f as f64) * (k as f64) / (m as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// Frequency-f Hermitian block of the circulant-algebra element whose first
/// rows over upper-triangle pairs are `x`.
fn frequency_block(x: &[Vec<f64>], b: usize, m: usize, f: usize) -> HermitianMat {
    let period = 2 * m;
    HermitianMat::from_fn_upper(b, |i, j| {
        let row = &x[pair_index(i, j, b)];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..period {
            acc += row[k] * dft_phase(f, k, m);
        }
        acc
    })
}

/// Result of a bound solve: certificate plus solver convergence. The
/// certificate is sound regardless of convergence.
#[derive(Debug, Clone)]
pub struct ZarSolve {
    pub certificate: ZarCertificate,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ZarDenseSolve {
    pub certificate: ZarDenseCertificate,
    pub converged: bool,
}

/// Extra controls for the reduced solve; m = 7 wants a time cap (its Newton
/// systems run matrix-free).
#[derive(Debug, Clone, Default)]
pub struct ZarSolveOptions {
    pub time_budget: Option<std::time::Duration>,
}

/// Solves the symmetry-reduced SDP_bound(m) for odd m and returns a
/// safe-rounded certificate: the diagonal blocks are lifted and t lowered
/// until every elementwise inequality and every frequency block re-verifies
/// with nonnegative margin.
pub fn sdp_bound_solve(q: &QMatrix, tt: &TypeTable, accuracy: f64) -> Result<ZarSolve> {
    sdp_bound_solve_with(q, tt, accuracy, &ZarSolveOptions::default())
}

pub fn sdp_bound_solve_with(
    q: &QMatrix,
    tt: &TypeTable,
    accuracy: f64,
    opts: &ZarSolveOptions,
) -> Result<ZarSolve> {
    let m = q.m() as usize;
    if m % 2 == 0 {
        return Err(Error::InvalidParameter(
            "reduced path needs odd m (the flip/shift group is only cyclic then); use sdp_bound_solve_dense"
                .into(),
        ));
    }
    if tt.m() != q.m() {
        return Err(Error::InvalidParameter(
            "type table and Q disagree on m".into(),
        ));
    }
    let b = tt.orbit_count();
    let period = 2 * m;
    let layout = ReducedLayout::new(m, b);

    let mut scalars = Vec::with_capacity((b * (b + 1) / 2) * period);
    for i in 0..b {
        for j in i..b {
            let row = q.orbit_row(b, i, j).expect("odd m carries orbit rows");
            let slots = layout.slots(i, j);
            for k in 0..period {
                scalars.push(ScalarConstraint {
                    terms: vec![(0, -1.0), (slots[k], -1.0)],
                    constant: row[k] as f64,
                });
            }
        }
    }

    // m+1 distinct frequency blocks; f and 2m-f are conjugates
    let mut blocks = Vec::with_capacity(m + 1);
    for f in 0..=m {
        let mut entries = Vec::new();
        for i in 0..b {
            for j in i..b {
                let slots = layout.slots(i, j);
                if i == j {
                    for k in 0..=m {
                        let mut coeff = dft_phase(f, k, m);
                        if k >= 1 && k < m {
                            coeff += dft_phase(f, period - k, m);
                        }
                        entries.push(BlockEntry {
                            var: slots[k],
                            row: i,
                            col: j,
                            coeff: Complex64::new(coeff.re, 0.0),
                        });
                    }
                } else {
                    for (k, &slot) in slots.iter().enumerate() {
                        entries.push(BlockEntry {
                            var: slot,
                            row: i,
                            col: j,
                            coeff: dft_phase(f, k, m),
                        });
                    }
                }
            }
        }
        blocks.push(PsdBlock {
            constant: HermitianMat::zeros(b),
            entries,
        });
    }

    let mut objective = vec![0.0; layout.num_vars];
    objective[0] = 1.0;
    let problem = ConicProblem {
        num_vars: layout.num_vars,
        objective,
        scalars,
        blocks,
    };
    let mut start = vec![0.0; layout.num_vars];
    start[0] = -1.0;
    for i in 0..b {
        start[layout.slots(i, i)[0]] = 0.5;
    }
    let solve_opts = SolveOptions {
        target_gap: (accuracy / 2.0).max(1e-12),
        time_budget: opts.time_budget,
        ..SolveOptions::default()
    };
    let sol = sdp::solve(&problem, start, &solve_opts)?;

    let mut t = sol.v[0];
    let mut x_blocks: Vec<Vec<f64>> = Vec::with_capacity(b * (b + 1) / 2);
    for i in 0..b {
        for j in i..b {
            let slots = layout.slots(i, j);
            x_blocks.push((0..period).map(|k| sol.v[slots[k]]).collect());
        }
    }

    // safe rounding, mirroring exactly what the verifier rechecks
    let mut tol: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for f in 0..period {
        let block = frequency_block(&x_blocks, b, m, f);
        tol = tol.max(tol_eig(block.spectral_radius_bound()));
        min_margin = min_margin.min(block.min_eigenvalue());
    }
    if min_margin < tol {
        let lift = tol - min_margin;
        for i in 0..b {
            x_blocks[pair_index(i, i, b)][0] += lift;
        }
    }
    let mut min_slack = f64::INFINITY;
    for i in 0..b {
        for j in i..b {
            let row = q.orbit_row(b, i, j).unwrap();
            let x = &x_blocks[pair_index(i, j, b)];
            for k in 0..period {
                min_slack = min_slack.min(row[k] as f64 - t - x[k]);
            }
        }
    }
    if min_slack < 1e-12 {
        t -= 1e-12 - min_slack;
    }

    Ok(ZarSolve {
        certificate: ZarCertificate {
            kind: "zar".into(),
            m: m as u32,
            t,
            x_blocks,
            tolerance: tol,
        },
        converged: sol.converged,
    })
}

/// Solves SDP_bound(m) without symmetry reduction: variables are t and the
/// dense psd summand S1. Guarded to m 2^m <= 200 (the even-m path).
pub fn sdp_bound_solve_dense(q: &QMatrix, accuracy: f64) -> Result<ZarDenseSolve> {
    let n = q.size();
    if n > 200 {
        return Err(Error::TooLarge(format!(
            "dense path limited to m 2^m <= 200, Types({}) has {n}",
            q.m()
        )));
    }
    let num_vars = 1 + n * (n + 1) / 2;
    let var_of = |i: usize, j: usize| 1 + pair_index(i, j, n);

    let mut scalars = Vec::with_capacity(n * (n + 1) / 2);
    let mut entries = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            scalars.push(ScalarConstraint {
                terms: vec![(0, -1.0), (var_of(i, j), -1.0)],
                constant: q.get(i, j) as f64,
            });
            entries.push(BlockEntry {
                var: var_of(i, j),
                row: i,
                col: j,
                coeff: Complex64::new(1.0, 0.0),
            });
        }
    }
    let problem = ConicProblem {
        num_vars,
        objective: {
            let mut c = vec![0.0; num_vars];
            c[0] = 1.0;
            c
        },
        scalars,
        blocks: vec![PsdBlock {
            constant: HermitianMat::zeros(n),
            entries,
        }],
    };
    let mut start = vec![0.0; num_vars];
    start[0] = -1.0;
    for i in 0..n {
        start[var_of(i, i)] = 0.5;
    }
    let opts = SolveOptions {
        target_gap: (accuracy / 2.0).max(1e-12),
        ..SolveOptions::default()
    };
    let sol = sdp::solve(&problem, start, &opts)?;

    let mut t = sol.v[0];
    let mut s1: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| sol.v[var_of(i.min(j), i.max(j))]).collect())
        .collect();
    let mat = HermitianMat::from_fn_upper(n, |i, j| Complex64::new(s1[i][j], 0.0));
    let tol = tol_eig(mat.spectral_radius_bound());
    let margin = mat.min_eigenvalue();
    if margin < tol {
        let lift = tol - margin;
        for (i, row) in s1.iter_mut().enumerate() {
            row[i] += lift;
        }
    }
    let mut min_slack = f64::INFINITY;
    for i in 0..n {
        for j in i..n {
            min_slack = min_slack.min(q.get(i, j) as f64 - t - s1[i][j]);
        }
    }
    if min_slack < 1e-12 {
        t -= 1e-12 - min_slack;
    }
    Ok(ZarDenseSolve {
        certificate: ZarDenseCertificate {
            kind: "zar-dense".into(),
            m: q.m(),
            t,
            s1,
            tolerance: tol,
        },
        converged: sol.converged,
    })
}

/// Verification outcome for either certificate kind.
#[derive(Debug, Clone, Serialize)]
pub struct ZarVerification {
    pub valid: bool,
    pub reason: Option<String>,
    /// Sound certified lower bound on SDP_bound(m): t minus the eigenvalue
    /// safety slack. Present only when valid.
    pub certified_t: Option<f64>,
    pub min_elementwise_slack: f64,
    pub min_block_margin: f64,
}

fn zar_invalid(reason: String) -> ZarVerification {
    ZarVerification {
        valid: false,
        reason: Some(reason),
        certified_t: None,
        min_elementwise_slack: f64::NEG_INFINITY,
        min_block_margin: f64::NEG_INFINITY,
    }
}

/// Rechecks a reduced certificate from scratch against Q: exact elementwise
/// inequalities on the integer circulant rows, the diagonal palindrome
/// condition, and psd margins of all 2m frequency blocks.
pub fn verify_zar_certificate(c: &ZarCertificate, q: &QMatrix) -> ZarVerification {
    if c.kind != "zar" {
        return zar_invalid(format!("kind is {:?}, expected \"zar\"", c.kind));
    }
    if c.m != q.m() {
        return zar_invalid(format!("certificate m={} but Q is for m={}", c.m, q.m()));
    }
    let m = c.m as usize;
    if m % 2 == 0 {
        return zar_invalid("reduced certificates require odd m".into());
    }
    let period = 2 * m;
    let b = 1usize << (m - 1);
    if c.x_blocks.len() != b * (b + 1) / 2 {
        return zar_invalid(format!(
            "expected {} x-blocks, got {}",
            b * (b + 1) / 2,
            c.x_blocks.len()
        ));
    }
    if c.x_blocks.iter().any(|x| x.len() != period) {
        return zar_invalid(format!("every x-block must have length {period}"));
    }
    if !c.t.is_finite() || c.x_blocks.iter().flatten().any(|v| !v.is_finite()) {
        return zar_invalid("non-finite entries".into());
    }
    // palindrome condition on diagonal blocks: x_k = x_{2m-k}
    for i in 0..b {
        let x = &c.x_blocks[pair_index(i, i, b)];
        for k in 1..m {
            let delta = (x[k] - x[period - k]).abs();
            if delta > 1e-12 * (1.0 + x[k].abs()) {
                return zar_invalid(format!(
                    "palindrome violation in diagonal block {i}: |x[{k}] - x[{}]| = {delta:.3e}",
                    period - k
                ));
            }
        }
    }
    // exact elementwise inequalities
    let mut min_slack = f64::INFINITY;
    for i in 0..b {
        for j in i..b {
            let Some(row) = q.orbit_row(b, i, j) else {
                return zar_invalid("Q carries no orbit rows (was it built for odd m?)".into());
            };
            let x = &c.x_blocks[pair_index(i, j, b)];
            for k in 0..period {
                min_slack = min_slack.min(row[k] as f64 - c.t - x[k]);
            }
        }
    }
    if min_slack < 0.0 {
        return zar_invalid(format!(
            "elementwise inequality violated: min q - t - x = {min_slack:.3e}"
        ));
    }
    // psd margins of all 2m frequency blocks
    let mut tol = c.tolerance.max(0.0);
    let mut min_margin = f64::INFINITY;
    for f in 0..period {
        let block = frequency_block(&c.x_blocks, b, m, f);
        tol = tol.max(tol_eig(block.spectral_radius_bound()));
        min_margin = min_margin.min(block.min_eigenvalue());
    }
    if min_margin < -tol {
        return zar_invalid(format!(
            "frequency block eigenvalue {min_margin:.3e} below -{tol:.3e}"
        ));
    }
    // eigenvalues are certified to +-tol: S1 + 2 tol I is truly psd, and
    // lowering t by 2 tol keeps S2 entrywise nonnegative, so t - 2 tol is a
    // true lower bound on SDP_bound(m).
    ZarVerification {
        valid: true,
        reason: None,
        certified_t: Some(c.t - 2.0 * tol - 1e-12),
        min_elementwise_slack: min_slack,
        min_block_margin: min_margin,
    }
}

/// Rechecks a dense certificate: S1 symmetric and psd within tolerance,
/// Q - tJ - S1 entrywise nonnegative.
pub fn verify_zar_dense_certificate(c: &ZarDenseCertificate, q: &QMatrix) -> ZarVerification {
    if c.kind != "zar-dense" {
        return zar_invalid(format!("kind is {:?}, expected \"zar-dense\"", c.kind));
    }
    if c.m != q.m() {
        return zar_invalid(format!("certificate m={} but Q is for m={}", c.m, q.m()));
    }
    let n = q.size();
    if c.s1.len() != n || c.s1.iter().any(|r| r.len() != n) {
        return zar_invalid(format!("S1 must be {n} x {n}"));
    }
    if !c.t.is_finite() || c.s1.iter().flatten().any(|v| !v.is_finite()) {
        return zar_invalid("non-finite entries".into());
    }
    for i in 0..n {
        for j in i..n {
            let delta = (c.s1[i][j] - c.s1[j][i]).abs();
            if delta > 1e-12 * (1.0 + c.s1[i][j].abs()) {
                return zar_invalid(format!("S1 not symmetric at ({i},{j})"));
            }
        }
    }
    let mut min_slack = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            min_slack = min_slack.min(q.get(i, j) as f64 - c.t - c.s1[i][j]);
        }
    }
    if min_slack < 0.0 {
        return zar_invalid(format!(
            "elementwise inequality violated: min q - t - s1 = {min_slack:.3e}"
        ));
    }
    let mat = HermitianMat::from_fn_upper(n, |i, j| Complex64::new(c.s1[i][j], 0.0));
    let tol = c.tolerance.max(0.0).max(tol_eig(mat.spectral_radius_bound()));
    let margin = mat.min_eigenvalue();
    if margin < -tol {
        return zar_invalid(format!("S1 eigenvalue {margin:.3e} below -{tol:.3e}"));
    }
    ZarVerification {
        valid: true,
        reason: None,
        certified_t: Some(c.t - 2.0 * tol - 1e-12),
        min_elementwise_slack: min_slack,
        min_block_margin: margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_counts_and_orbits() {
        let t3 = build_type_table(3).unwrap();
        assert_eq!(t3.type_count(), 24);
        assert_eq!(t3.orbit_count(), 4);
        assert!(t3.orbits().iter().all(|o| o.len() == 6));

        let t7 = build_type_table(7).unwrap();
        assert_eq!(t7.type_count(), 896);
        assert_eq!(t7.orbit_count(), 64);
        assert!(t7.orbits().iter().all(|o| o.len() == 14));

        assert!(build_type_table(1).is_err());
        assert!(build_type_table(10).is_err());
    }

    #[test]
    fn g_has_order_2m_for_odd_m() {
        for m in [3u32, 5, 7] {
            let count = (m as usize) << m;
            for idx in 0..count {
                let start = RedType::from_index(idx, m);
                let mut t = start;
                for step in 1..=2 * m {
                    t = g_step(t, m);
                    if t == start {
                        assert_eq!(step, 2 * m, "m={m}, type {idx}");
                    }
                }
                assert_eq!(t, start);
            }
        }
    }

    #[test]
    fn orbits_stored_in_g_power_order() {
        for m in [3u32, 5] {
            let tt = build_type_table(m).unwrap();
            for orbit in tt.orbits() {
                for w in 0..orbit.len() {
                    let here = RedType::from_index(orbit[w], m);
                    let next = orbit[(w + 1) % orbit.len()];
                    assert_eq!(g_step(here, m).index(m), next);
                }
            }
        }
    }

    /// Figure fixture: 1-based types (2,{1,2,3,5}) and (3,{1,3,4,5}) of a
    /// K_{5,n} drawing force exactly 2 crossings; 0-based they are
    /// (1,{0,1,2,4}) and (2,{0,2,3,4}).
    #[test]
    fn bracket_fixture() {
        let sigma = RedType { p: 1, upper: 0b10111 };
        let tau = RedType { p: 2, upper: 0b11101 };
        assert_eq!(pair_count(sigma, tau, 5), 2);
    }

    #[test]
    fn bracket_trivial_cases() {
        let m = 4;
        let full = RedType { p: 3, upper: 0b1111 };
        let empty = RedType { p: 3, upper: 0 };
        assert_eq!(pair_count(full, empty, m), 0);
        // coincident all-upper stars force one crossing per blue pair
        assert_eq!(pair_count(full, full, m), 6);
    }

    /// Independent geometric oracle: place both stars on a line and count
    /// alternating same-page pairs directly.
    fn geometric_oracle(sigma: RedType, tau: RedType, m: u32) -> u32 {
        let r_pos = sigma.p as f64 + if sigma.p == tau.p { 0.4 } else { 0.5 };
        let rp_pos = tau.p as f64 + 0.6;
        let mut count = 0;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                if (sigma.upper >> i & 1) != (tau.upper >> j & 1) {
                    continue;
                }
                let (a1, b1) = (r_pos.min(i as f64), r_pos.max(i as f64));
                let (a2, b2) = (rp_pos.min(j as f64), rp_pos.max(j as f64));
                let alternate = (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1);
                if alternate {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn bracket_matches_geometric_oracle() {
        for m in 2..=5u32 {
            let count = (m as usize) << m;
            for si in 0..count {
                let sigma = RedType::from_index(si, m);
                for ti in 0..count {
                    let tau = RedType::from_index(ti, m);
                    if sigma.p <= tau.p {
                        assert_eq!(
                            pair_count(sigma, tau, m),
                            geometric_oracle(sigma, tau, m),
                            "m={m} sigma={sigma:?} tau={tau:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn q_symmetric_group_invariant_and_bounded() {
        for m in [3u32, 5] {
            let tt = build_type_table(m).unwrap();
            let q = build_q_matrix(&tt);
            let size = q.size();
            let cm2 = m * (m - 1) / 2;
            for i in 0..size {
                assert!(q.get(i, i) <= cm2);
                let ti = tt.type_at(i);
                for j in 0..size {
                    assert_eq!(q.get(i, j), q.get(j, i));
                    let tj = tt.type_at(j);
                    let (f1, f2) = (flip(ti, m).index(m), flip(tj, m).index(m));
                    assert_eq!(q.get(i, j), q.get(f1, f2));
                    let (s1, s2) = (cyclic_shift(ti, m).index(m), cyclic_shift(tj, m).index(m));
                    assert_eq!(q.get(i, j), q.get(s1, s2));
                }
            }
        }
    }

    /// Each (i,j) is counted at most once per direction, so every bracket is
    /// at most m^2; and when the positions coincide (the one case where both
    /// orders are geometrically realizable) the two directions together stay
    /// within m^2 as well. The unrestricted two-direction sum can exceed m^2
    /// (e.g. (0,{}) vs (3,{}) at m=4 gives 3 + 15) because the reversed
    /// bracket of an impossible left-right order counts vacuous pairs.
    #[test]
    fn bracket_sum_bounded_by_m_squared() {
        for m in 2..=5u32 {
            let count = (m as usize) << m;
            for si in 0..count {
                for ti in 0..count {
                    let s = RedType::from_index(si, m);
                    let t = RedType::from_index(ti, m);
                    assert!(pair_count(s, t, m) <= m * m);
                    if s.p == t.p {
                        assert!(pair_count(s, t, m) + pair_count(t, s, m) <= m * m);
                    }
                }
            }
        }
    }

    #[test]
    fn reordered_q_is_block_circulant() {
        let m = 3u32;
        let tt = build_type_table(m).unwrap();
        let q = build_q_matrix(&tt);
        let period = 2 * m as usize;
        for (bi, oi) in tt.orbits().iter().enumerate() {
            for (bj, oj) in tt.orbits().iter().enumerate() {
                let first = q.orbit_row(tt.orbit_count(), bi, bj).unwrap();
                for a in 0..period {
                    for bb in 0..period {
                        let want = first[(bb + period - a) % period];
                        assert_eq!(
                            q.get(oi[a], oj[bb]),
                            want,
                            "block ({bi},{bj}) at ({a},{bb})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn qp_objective_cases() {
        let tt = build_type_table(3).unwrap();
        let q = build_q_matrix(&tt);
        let mut x = vec![0.0; q.size()];
        x[5] = 1.0;
        assert_eq!(qp_objective(&x, &q).unwrap(), q.get(5, 5) as f64);
        let u = vec![1.0 / q.size() as f64; q.size()];
        assert!(qp_objective(&u, &q).unwrap() > 0.0);
        let bad = vec![0.5; q.size()];
        assert!(qp_objective(&bad, &q).is_err());
    }

    #[test]
    fn trivial_zero_certificate_valid_and_tamper_detected() {
        // t = 0, x = 0 is feasible because Q is a count matrix (min entry 0)
        let tt = build_type_table(3).unwrap();
        let q = build_q_matrix(&tt);
        let b = tt.orbit_count();
        let c = ZarCertificate {
            kind: "zar".into(),
            m: 3,
            t: 0.0,
            x_blocks: vec![vec![0.0; 6]; b * (b + 1) / 2],
            tolerance: 0.0,
        };
        let v = verify_zar_certificate(&c, &q);
        assert!(v.valid, "{:?}", v.reason);

        let mut tampered = c.clone();
        // bump an off-diagonal block entry past the largest q value
        tampered.x_blocks[1][0] += q.max_diagonal() as f64 + 1.0;
        let v = verify_zar_certificate(&tampered, &q);
        assert!(!v.valid);
        assert!(v.reason.unwrap().contains("elementwise"));
    }

    #[test]
    fn sdp_bound_m3_is_half() {
        let tt = build_type_table(3).unwrap();
        let q = build_q_matrix(&tt);
        let solve = sdp_bound_solve(&q, &tt, 1e-5).unwrap();
        assert!(solve.converged);
        let v = verify_zar_certificate(&solve.certificate, &q);
        assert!(v.valid, "{:?}", v.reason);
        let t = v.certified_t.unwrap();
        assert!((t - 0.5).abs() < 1e-4, "certified t = {t}");
    }

    #[test]
    fn dense_path_agrees_m3() {
        let tt = build_type_table(3).unwrap();
        let q = build_q_matrix(&tt);
        let dense = sdp_bound_solve_dense(&q, 1e-5).unwrap();
        let v = verify_zar_dense_certificate(&dense.certificate, &q);
        assert!(v.valid, "{:?}", v.reason);
        assert!((v.certified_t.unwrap() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn dense_path_m2() {
        // Z(2,n) = 0: the bound comes out 0, matching K_{2,n} planarity
        let tt = build_type_table(2).unwrap();
        let q = build_q_matrix(&tt);
        let dense = sdp_bound_solve_dense(&q, 1e-6).unwrap();
        let v = verify_zar_dense_certificate(&dense.certificate, &q);
        assert!(v.valid);
        let t = v.certified_t.unwrap();
        assert!(t.abs() < 1e-4, "SDP_bound(2) = {t}");
    }

    #[test]
    fn reduced_path_rejects_even_m() {
        let tt = build_type_table(4).unwrap();
        let q = build_q_matrix(&tt);
        assert!(sdp_bound_solve(&q, &tt, 1e-4).is_err());
    }

    #[test]
    fn zar_certificate_json_roundtrip() {
        let tt = build_type_table(3).unwrap();
        let q = build_q_matrix(&tt);
        let solve = sdp_bound_solve(&q, &tt, 1e-4).unwrap();
        let json = solve.certificate.to_json();
        let back = ZarCertificate::from_json(&json).unwrap();
        assert!(verify_zar_certificate(&back, &q).valid);
    }
}
