//! Exact maximum cut on G_n by branch and bound, and the resulting exact
//! values nu2(K_n) = C(n,4) - maxcut(G_n).
//!
//! The solver assigns chords to sides in a static decreasing-degree order.
//! Pruning combines three sound upper bounds:
//!
//! - greedy completion: each unassigned vertex contributes at most
//!   max(edges to assigned side 0, edges to assigned side 1);
//! - a precomputed bound on the max cut of every order suffix (exact by
//!   enumeration for small suffixes, GW / spectral otherwise);
//! - a per-node Goemans-Williamson bound on the full remaining subproblem
//!   (the assigned boundary folds into one weighted apex vertex), solved by
//!   the barrier method and safe-rounded, so pruning never cuts off an
//!   optimal completion.
//!
//! The search is sequential and fully deterministic.

use crate::circle::ChordGraph;
use crate::drawing::{drawing_from_cut, Edge, Page, TwoPageDrawing};
use crate::gw::gw_full_laplacian_witness;
use crate::hermitian::{tol_eig, HermitianMat};
use crate::{binomial, count_crossings, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::time::Instant;

/// Node/time limits for the search. Exhaustion is a reported status, not an
/// error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Print heartbeat lines to stderr during long searches.
    pub progress: bool,
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Budget {
        Budget {
            max_nodes: Some(max_nodes),
            ..Budget::default()
        }
    }

    pub fn seconds(max_seconds: f64) -> Budget {
        Budget {
            max_seconds: Some(max_seconds),
            ..Budget::default()
        }
    }
}

/// A bipartition of the chord-graph vertices with its cut value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPartition {
    pub side: Vec<bool>,
    pub value: u64,
}

impl CutPartition {
    /// Recounts the cut edges from scratch.
    pub fn recount(&self, g: &ChordGraph) -> u64 {
        let mut value = 0;
        for (i, j) in g.edges() {
            if self.side[i] != self.side[j] {
                value += 1;
            }
        }
        value
    }

    pub fn bitstring(&self) -> String {
        self.side.iter().map(|&s| if s { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofStatus {
    Exact,
    BoundOnly,
}

/// Outcome of a max-cut run. `optimum` is the best cut found; it equals the
/// true maximum exactly when `proof_status` is `Exact`, and `upper_bound`
/// always dominates the true maximum.
#[derive(Debug, Clone)]
pub struct MaxcutResult {
    pub optimum: u64,
    pub upper_bound: u64,
    pub witness: CutPartition,
    pub nodes_explored: u64,
    pub proof_status: ProofStatus,
}

impl Serialize for MaxcutResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MaxcutResult", 5)?;
        st.serialize_field("optimum", &self.optimum)?;
        st.serialize_field("upper_bound", &self.upper_bound)?;
        st.serialize_field("witness", &self.witness.bitstring())?;
        st.serialize_field("nodes_explored", &self.nodes_explored)?;
        st.serialize_field("proof_status", &self.proof_status)?;
        st.end()
    }
}

/// Compact adjacency bitsets in a fixed vertex order.
struct BitGraph {
    n_v: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitGraph {
    fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn cut_value(&self, side: &[bool]) -> u64 {
        let mut v = 0;
        for i in 0..self.n_v {
            for j in (i + 1)..self.n_v {
                if self.adjacent(i, j) && side[i] != side[j] {
                    v += 1;
                }
            }
        }
        v
    }
}

struct Searcher {
    g: BitGraph,
    progress: bool,
    /// Static branch order was applied already: vertex k is decided at depth k.
    suffix_ub: Vec<u64>,
    deadline: Option<Instant>,
    node_cap: u64,
    nodes: u64,
    incumbent: u64,
    incumbent_side: Vec<bool>,
    side: Vec<bool>,
    a0: Vec<u32>,
    a1: Vec<u32>,
    aborted: bool,
    abandoned_ub: u64,
    /// Invoke the per-node GW bound only above this many unassigned vertices.
    sdp_min_unassigned: usize,
}

impl Searcher {
    fn budget_left(&self) -> bool {
        if self.nodes >= self.node_cap {
            return false;
        }
        if let Some(d) = self.deadline {
            // check the clock sparsely, it is not free
            if self.nodes % 256 == 0 && Instant::now() > d {
                return false;
            }
        }
        true
    }

    fn cheap_bound(&self, depth: usize, cut: u64) -> u64 {
        let mut b = cut + self.suffix_ub[depth];
        for v in depth..self.g.n_v {
            b += self.a0[v].max(self.a1[v]) as u64;
        }
        b
    }

    fn sdp_bound(&self, depth: usize, cut: u64) -> u64 {
        let u = self.g.n_v - depth;
        let dim = u + 1; // apex vertex 0 stands for assigned side 0
        let mut w = vec![0.0f64; dim * dim];
        let mut constant = cut;
        for v in depth..self.g.n_v {
            constant += self.a1[v] as u64;
            let t = self.a0[v] as f64 - self.a1[v] as f64;
            let vi = v - depth + 1;
            w[vi] = t;
            w[vi * dim] = t;
            for x in (v + 1)..self.g.n_v {
                if self.g.adjacent(v, x) {
                    let xi = x - depth + 1;
                    w[vi * dim + xi] = 1.0;
                    w[xi * dim + vi] = 1.0;
                }
            }
        }
        let mut lap = vec![0.0f64; dim * dim];
        for i in 0..dim {
            let mut deg = 0.0;
            for j in 0..dim {
                deg += w[i * dim + j];
                lap[i * dim + j] = -w[i * dim + j];
            }
            lap[i * dim + i] = deg;
        }
        match gw_full_laplacian_witness(dim, &lap, 3e-3, None) {
            Ok((gw, _)) => {
                let total = constant as f64 + gw;
                (total + 1e-6 * (1.0 + total)).floor() as u64
            }
            Err(_) => u64::MAX,
        }
    }

    fn search(&mut self, depth: usize, cut: u64) {
        self.nodes += 1;
        if self.progress && self.nodes % (1 << 21) == 0 {
            eprintln!(
                "maxcut: {} nodes explored, incumbent {}",
                self.nodes, self.incumbent
            );
        }
        if depth == self.g.n_v {
            if cut > self.incumbent {
                self.incumbent = cut;
                self.incumbent_side = self.side.clone();
            }
            return;
        }
        let mut bound = self.cheap_bound(depth, cut);
        if bound <= self.incumbent {
            return;
        }
        if !self.budget_left() {
            self.aborted = true;
            self.abandoned_ub = self.abandoned_ub.max(bound);
            return;
        }
        if self.g.n_v - depth >= self.sdp_min_unassigned {
            bound = bound.min(self.sdp_bound(depth, cut));
            if bound <= self.incumbent {
                return;
            }
        }

        let v = depth;
        let gain0 = self.a1[v] as u64;
        let gain1 = self.a0[v] as u64;
        let order = if gain1 > gain0 { [true, false] } else { [false, true] };
        for s in order {
            self.side[v] = s;
            let gain = if s { gain1 } else { gain0 };
            for x in (depth + 1)..self.g.n_v {
                if self.g.adjacent(v, x) {
                    if s {
                        self.a1[x] += 1;
                    } else {
                        self.a0[x] += 1;
                    }
                }
            }
            self.search(depth + 1, cut + gain);
            for x in (depth + 1)..self.g.n_v {
                if self.g.adjacent(v, x) {
                    if s {
                        self.a1[x] -= 1;
                    } else {
                        self.a0[x] -= 1;
                    }
                }
            }
            if self.aborted {
                // this node's own bound covers its unexplored siblings too
                self.abandoned_ub = self.abandoned_ub.max(bound);
                return;
            }
        }
    }
}

fn local_search_incumbent(bg: &BitGraph, restarts: u32, seed: u64) -> (u64, Vec<bool>) {
    let n = bg.n_v;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0u64;
    let mut best_side = vec![false; n];
    for r in 0..restarts {
        let mut side: Vec<bool> = (0..n).map(|_| r > 0 && rng.gen_bool(0.5)).collect();
        loop {
            // best-improvement single flips
            let mut best_gain = 0i64;
            let mut best_v = usize::MAX;
            for v in 0..n {
                let mut same = 0i64;
                let mut cross = 0i64;
                for x in 0..n {
                    if x != v && bg.adjacent(v, x) {
                        if side[x] == side[v] {
                            same += 1;
                        } else {
                            cross += 1;
                        }
                    }
                }
                let gain = same - cross;
                if gain > best_gain {
                    best_gain = gain;
                    best_v = v;
                }
            }
            if best_v == usize::MAX {
                break;
            }
            side[best_v] = !side[best_v];
        }
        let value = bg.cut_value(&side);
        if value > best {
            best = value;
            best_side = side;
        }
    }
    (best, best_side)
}

/// Sound upper bounds for the max cut of every branch-order suffix:
/// exact by enumeration up to 20 vertices, otherwise min of edge count,
/// the spectral bound |S|/4 * lambda_max(L_S), a GW solve, and the
/// peel-one-vertex recurrence.
fn suffix_bounds(bg: &BitGraph) -> Vec<u64> {
    let n = bg.n_v;
    let mut ub = vec![0u64; n + 1];
    for k in (0..n).rev() {
        let verts: Vec<usize> = (k..n).collect();
        let u = verts.len();
        let mut edges = 0u64;
        let mut deg_k = 0u64;
        for (a, &i) in verts.iter().enumerate() {
            for &j in &verts[a + 1..] {
                if bg.adjacent(i, j) {
                    edges += 1;
                    if i == k || j == k {
                        deg_k += 1;
                    }
                }
            }
        }
        let mut bound = edges.min(ub[k + 1] + deg_k);
        if u <= 20 {
            bound = bound.min(brute_force_suffix(bg, &verts));
        } else {
            let mut lap = vec![0.0f64; u * u];
            for a in 0..u {
                for b in 0..u {
                    if a != b && bg.adjacent(verts[a], verts[b]) {
                        lap[a * u + b] = -1.0;
                        lap[a * u + a] += 1.0;
                    }
                }
            }
            let h = HermitianMat::from_real(u, &lap);
            let lmax = h.eigenvalues()[u - 1];
            let spectral = (u as f64 / 4.0) * (lmax + tol_eig(h.spectral_radius_bound()));
            bound = bound.min(spectral.floor() as u64);
            if let Ok((gwb, _)) = gw_full_laplacian_witness(u, &lap, 3e-3, None) {
                bound = bound.min((gwb + 1e-6 * (1.0 + gwb)).floor() as u64);
            }
        }
        ub[k] = bound;
    }
    ub
}

fn brute_force_suffix(bg: &BitGraph, verts: &[usize]) -> u64 {
    let u = verts.len();
    if u <= 1 {
        return 0;
    }
    let mut adj = vec![0u32; u];
    for a in 0..u {
        for b in 0..u {
            if a != b && bg.adjacent(verts[a], verts[b]) {
                adj[a] |= 1 << b;
            }
        }
    }
    let low = (1u32 << u) - 1;
    let mut best = 0u64;
    // vertex u-1 fixed on side 0; mask bits give the sides of the others
    for mask in 0u32..(1 << (u - 1)) {
        let mut doubled = 0u32;
        for a in 0..u {
            let opposite = if mask >> a & 1 == 1 { !mask } else { mask };
            doubled += (adj[a] & opposite & low).count_ones();
        }
        best = best.max((doubled / 2) as u64);
    }
    best
}

/// Exact maximum cut of the chord graph by branch and bound.
pub fn maxcut_exact(g: &ChordGraph, budget: &Budget) -> Result<MaxcutResult> {
    maxcut_exact_seeded(g, budget, 0xC0FFEE)
}

/// Like [`maxcut_exact`] with an explicit seed for the incumbent heuristic;
/// the proved optimum does not depend on it.
pub fn maxcut_exact_seeded(g: &ChordGraph, budget: &Budget, seed: u64) -> Result<MaxcutResult> {
    let p = g.vertex_count();
    if p > 128 {
        return Err(Error::TooLarge(format!(
            "branch and bound limited to 128 chords, G_{} has {p}",
            g.n()
        )));
    }
    // static order: decreasing degree, canonical chord order breaking ties
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let words = p.div_ceil(64);
    let mut rows = vec![0u64; p * words];
    for a in 0..p {
        for b in 0..p {
            if a != b && g.are_adjacent(order[a], order[b]) {
                rows[a * words + b / 64] |= 1 << (b % 64);
            }
        }
    }
    let bg = BitGraph { n_v: p, words, rows };

    let (ls_value, ls_side) = local_search_incumbent(&bg, 30, seed ^ g.n() as u64);
    let suffix_ub = suffix_bounds(&bg);

    // root bound already closes the gap: no search needed
    if suffix_ub[0] <= ls_value {
        let mut side = vec![false; p];
        for (pos, &orig) in order.iter().enumerate() {
            side[orig] = ls_side[pos];
        }
        let witness = CutPartition {
            value: ls_value,
            side,
        };
        debug_assert_eq!(witness.recount(g), witness.value);
        return Ok(MaxcutResult {
            optimum: ls_value,
            upper_bound: ls_value,
            witness,
            nodes_explored: 1,
            proof_status: ProofStatus::Exact,
        });
    }

    let deadline = budget
        .max_seconds
        .map(|s| Instant::now() + std::time::Duration::from_secs_f64(s));
    let mut searcher = Searcher {
        suffix_ub,
        deadline,
        node_cap: budget.max_nodes.unwrap_or(u64::MAX),
        nodes: 0,
        incumbent: ls_value,
        incumbent_side: ls_side,
        side: vec![false; p],
        a0: vec![0; p],
        a1: vec![0; p],
        aborted: false,
        abandoned_ub: 0,
        sdp_min_unassigned: 22,
        progress: budget.progress,
        g: bg,
    };
    // first vertex fixed to side 0: cuts are complementation-invariant
    searcher.side[0] = false;
    for x in 1..p {
        if searcher.g.adjacent(0, x) {
            searcher.a0[x] += 1;
        }
    }
    searcher.nodes += 1;
    searcher.search(1, 0);

    let status = if searcher.aborted {
        ProofStatus::BoundOnly
    } else {
        ProofStatus::Exact
    };
    let upper_bound = match status {
        ProofStatus::Exact => searcher.incumbent,
        ProofStatus::BoundOnly => searcher.incumbent.max(searcher.abandoned_ub),
    };
    // map the witness back to canonical chord order
    let mut side = vec![false; p];
    for (pos, &orig) in order.iter().enumerate() {
        side[orig] = searcher.incumbent_side[pos];
    }
    let witness = CutPartition {
        value: searcher.incumbent,
        side,
    };
    debug_assert_eq!(witness.recount(g), witness.value);
    Ok(MaxcutResult {
        optimum: searcher.incumbent,
        upper_bound,
        witness,
        nodes_explored: searcher.nodes,
        proof_status: status,
    })
}

/// nu2(K_n) with a witness drawing.
#[derive(Debug, Clone, Serialize)]
pub struct Nu2Result {
    pub n: u32,
    /// Crossings of the witness drawing: C(n,4) - best cut found.
    pub nu2_upper: u64,
    /// C(n,4) - (maxcut upper bound); equals `nu2_upper` when exact.
    pub nu2_lower: u64,
    pub exact: bool,
    pub drawing: TwoPageDrawing,
    #[serde(skip)]
    pub maxcut: Option<MaxcutResult>,
}

impl Nu2Result {
    /// The exact value when proven.
    pub fn value(&self) -> Option<u64> {
        self.exact.then_some(self.nu2_upper)
    }
}

/// Exact nu2(K_n) = C(n,4) - maxcut(G_n) with a witness drawing whose
/// counted crossings equal the value. Times out into a bound-only result.
pub fn nu2_complete_exact(n: u32, budget: &Budget) -> Result<Nu2Result> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    if n == 3 {
        let spine = vec![0, 1, 2];
        let edges = vec![
            Edge(0, 1, Page::Upper),
            Edge(1, 2, Page::Upper),
            Edge(0, 2, Page::Upper),
        ];
        let drawing = TwoPageDrawing::new(spine, edges)?;
        return Ok(Nu2Result {
            n,
            nu2_upper: 0,
            nu2_lower: 0,
            exact: true,
            drawing,
            maxcut: None,
        });
    }
    let g = crate::circle::build_chord_graph(n)?;
    let e_n = binomial(n as u64, 4) as u64;
    let mc = maxcut_exact(&g, budget)?;
    let drawing = drawing_from_cut(&g, &mc.witness.side)?;
    let counted = count_crossings(&drawing)?;
    let nu2_upper = e_n - mc.optimum;
    if counted != nu2_upper {
        return Err(Error::SelfCheck(format!(
            "witness drawing has {counted} crossings, expected {nu2_upper}"
        )));
    }
    Ok(Nu2Result {
        n,
        nu2_upper,
        nu2_lower: e_n.saturating_sub(mc.upper_bound),
        exact: mc.proof_status == ProofStatus::Exact,
        drawing,
        maxcut: Some(mc),
    })
}

/// The deletion-counting step: a lower bound nu_odd on nu2(K_n) for odd n
/// lifts to ceil((n+1) nu_odd / (n-3)) for nu2(K_{n+1}). With nu_odd = Z(n)
/// this lands exactly on Z(n+1).
pub fn odd_to_even_step(nu_odd: u64, n_odd: u32) -> Result<u64> {
    if n_odd % 2 == 0 || n_odd < 5 {
        return Err(Error::InvalidParameter(format!(
            "need odd n >= 5, got {n_odd}"
        )));
    }
    let num = (n_odd as u128 + 1) * nu_odd as u128;
    let den = (n_odd - 3) as u128;
    Ok(num.div_ceil(den) as u64)
}
