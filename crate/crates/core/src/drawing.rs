//! 2-page drawings: crossing counting, optimal-drawing witnesses, and
//! red-vertex types of K_{m,n} drawings.
//!
//! A drawing is a spine order plus an upper/lower page per edge. Two edges
//! on the same page cross exactly when their endpoints alternate along the
//! spine; edges on different pages, or sharing an endpoint, never cross.
//! The circular model (vertices on a circle, edges inside/outside) is
//! equivalent: cut the circle between two vertices and the inside/outside
//! sides become the two pages.

use crate::circle::{zeta_bipartite, ChordGraph};
use crate::{binomial, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Page {
    Upper,
    Lower,
}

impl Page {
    pub fn flipped(self) -> Page {
        match self {
            Page::Upper => Page::Lower,
            Page::Lower => Page::Upper,
        }
    }
}

/// One edge of a drawing, serialized as `[u, v, "upper"|"lower"]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge(pub u32, pub u32, pub Page);

/// A 2-page drawing: spine order and per-edge page assignment.
///
/// JSON form: `{"spine": [...], "edges": [[u, v, "upper"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPageDrawing {
    pub spine: Vec<u32>,
    pub edges: Vec<Edge>,
}

impl TwoPageDrawing {
    pub fn new(spine: Vec<u32>, edges: Vec<Edge>) -> Result<TwoPageDrawing> {
        let d = TwoPageDrawing { spine, edges };
        d.validate()?;
        Ok(d)
    }

    /// Checks the spine is duplicate-free and every edge endpoint is on it.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for &v in &self.spine {
            if !seen.insert(v) {
                return Err(Error::BadDrawing(format!("repeated spine vertex {v}")));
            }
        }
        for e in &self.edges {
            if e.0 == e.1 {
                return Err(Error::BadDrawing(format!("loop edge at {}", e.0)));
            }
            if !seen.contains(&e.0) || !seen.contains(&e.1) {
                return Err(Error::BadDrawing(format!(
                    "edge ({},{}) has an endpoint off the spine",
                    e.0, e.1
                )));
            }
        }
        Ok(())
    }

    /// Spine position of each vertex label.
    fn positions(&self) -> std::collections::HashMap<u32, usize> {
        self.spine
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("drawing serializes")
    }

    pub fn from_json(s: &str) -> Result<TwoPageDrawing> {
        let d: TwoPageDrawing = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }
}

fn alternate(p1: usize, q1: usize, p2: usize, q2: usize) -> bool {
    let (p1, q1) = if p1 < q1 { (p1, q1) } else { (q1, p1) };
    let (p2, q2) = if p2 < q2 { (p2, q2) } else { (q2, p2) };
    (p1 < p2 && p2 < q1 && q1 < q2) || (p2 < p1 && p1 < q2 && q2 < q1)
}

/// Counts crossings: unordered same-page edge pairs with four distinct
/// endpoints that alternate along the spine.
pub fn count_crossings(d: &TwoPageDrawing) -> Result<u64> {
    d.validate()?;
    let pos = d.positions();
    let located: Vec<(usize, usize, Page)> = d
        .edges
        .iter()
        .map(|e| (pos[&e.0], pos[&e.1], e.2))
        .collect();
    let mut count = 0u64;
    for (i, &(p1, q1, pg1)) in located.iter().enumerate() {
        for &(p2, q2, pg2) in &located[i + 1..] {
            if pg1 != pg2 {
                continue;
            }
            if p1 == p2 || p1 == q2 || q1 == p2 || q1 == q2 {
                continue;
            }
            if alternate(p1, q1, p2, q2) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Crossings between the stars of two red vertices of a K_{m,n} drawing
/// (labels >= m are red). Counts same-page alternating pairs with one edge
/// incident to each red vertex.
pub fn star_pair_crossings(d: &TwoPageDrawing, ra: u32, rb: u32) -> Result<u64> {
    let pos = d.positions();
    let star = |r: u32| -> Vec<(usize, usize, Page)> {
        d.edges
            .iter()
            .filter(|e| e.0 == r || e.1 == r)
            .map(|e| (pos[&e.0], pos[&e.1], e.2))
            .collect()
    };
    let sa = star(ra);
    let sb = star(rb);
    let mut count = 0u64;
    for &(p1, q1, pg1) in &sa {
        for &(p2, q2, pg2) in &sb {
            if pg1 != pg2 || p1 == p2 || p1 == q2 || q1 == p2 || q1 == q2 {
                continue;
            }
            if alternate(p1, q1, p2, q2) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Turns a cut of G_n into a 2-page drawing of K_n: spine 0..n-1, the
/// Hamiltonian cycle on the upper page (those edges cross nothing), chords
/// on the cut side `inside` drawn lower, the rest upper.
///
/// The crossing count is C(n,4) minus the cut value: same-side chord pairs
/// cross, opposite-side pairs do not.
pub fn drawing_from_cut(g: &ChordGraph, inside: &[bool]) -> Result<TwoPageDrawing> {
    let n = g.n();
    if inside.len() != g.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "cut has {} sides for {} chords",
            inside.len(),
            g.vertex_count()
        )));
    }
    let spine: Vec<u32> = (0..n).collect();
    let mut edges = Vec::with_capacity(binomial(n as u64, 2) as usize);
    for i in 0..n {
        edges.push(Edge(i, (i + 1) % n, Page::Upper));
    }
    for (k, c) in g.chords().iter().enumerate() {
        let page = if inside[k] { Page::Lower } else { Page::Upper };
        edges.push(Edge(c.a, c.b, page));
    }
    TwoPageDrawing::new(spine, edges)
}

/// The 2-page Zarankiewicz drawing of K_{m,n} with exactly Z(m,n) crossings.
///
/// From the planar drawing (blue vertices split left/right on the x-axis,
/// red split up/down on the y-axis, straight edges), a curve through all
/// vertices — west blues outward-in, south reds inward-out, around infinity,
/// east blues outward-in, north reds inward-out — becomes the spine. The
/// two curve sides merge opposite quadrants: west-south and east-north
/// edges land on one page, west-north and east-south on the other.
///
/// Blue labels are 0..m-1 and red labels m..m+n-1, both in spine order.
/// The count is re-verified against Z(m,n) and any mismatch is an error.
pub fn zarankiewicz_drawing(m: u32, n: u32) -> Result<TwoPageDrawing> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "K_{{m,n}} needs m,n >= 1, got ({m},{n})"
        )));
    }
    let west = (m / 2) as usize; // blues west of the origin
    let south = (n / 2) as usize; // reds south of the origin
    let mut spine: Vec<u32> = Vec::with_capacity((m + n) as usize);
    spine.extend(0..west as u32); // west blues, outermost first
    spine.extend((0..south as u32).map(|r| m + r)); // south reds, innermost first
    spine.extend(west as u32..m); // east blues, outermost first
    spine.extend((south as u32..n).map(|r| m + r)); // north reds, innermost first
    let mut edges = Vec::with_capacity((m * n) as usize);
    for b in 0..m as usize {
        for r in 0..n as usize {
            let b_west = b < west;
            let r_south = r < south;
            // west-south and east-north on the upper page
            let page = if b_west == r_south { Page::Upper } else { Page::Lower };
            edges.push(Edge(b as u32, m + r as u32, page));
        }
    }
    let d = TwoPageDrawing::new(spine, edges)?;
    let got = count_crossings(&d)?;
    let want = zeta_bipartite(m as u64, n as u64);
    if got != want {
        return Err(Error::SelfCheck(format!(
            "Zarankiewicz drawing of K_{{{m},{n}}} counted {got} crossings, expected Z = {want}"
        )));
    }
    Ok(d)
}

/// The type (p, U) of a red vertex: p is its 0-based position among the
/// blue vertices (number of blues strictly to its left, minus one, after
/// normalization) and U is the bitmask of blue indices joined to it on the
/// upper page. Blue index k means the (k+1)-th blue vertex from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RedType {
    pub p: u8,
    pub upper: u16,
}

impl RedType {
    /// Canonical index in Types(m): p * 2^m + upper.
    pub fn index(&self, m: u32) -> usize {
        (self.p as usize) << m | self.upper as usize
    }

    pub fn from_index(idx: usize, m: u32) -> RedType {
        RedType {
            p: (idx >> m) as u8,
            upper: (idx & ((1 << m) - 1)) as u16,
        }
    }
}

/// Rotates the spine until no red vertex lies left of the leftmost blue
/// vertex, moving leftmost reds to the right end. In the circular model this
/// is a rotation, so the crossing count is unchanged; pages are preserved.
pub fn normalize_kmn(d: &TwoPageDrawing, m: u32) -> Result<TwoPageDrawing> {
    validate_kmn(d, m)?;
    let mut spine = d.spine.clone();
    for _ in 0..spine.len() {
        if spine[0] < m {
            let out = TwoPageDrawing {
                spine,
                edges: d.edges.clone(),
            };
            return Ok(out);
        }
        spine.rotate_left(1);
    }
    Err(Error::BadDrawing("no blue vertex on the spine".into()))
}

fn validate_kmn(d: &TwoPageDrawing, m: u32) -> Result<()> {
    d.validate()?;
    let total = d.spine.len() as u32;
    if m == 0 || total <= m {
        return Err(Error::BadDrawing(format!(
            "K_{{m,n}} drawing needs m >= 1 blue and n >= 1 red vertices, got m={m}, {total} spine vertices"
        )));
    }
    for &v in &d.spine {
        if v >= total {
            return Err(Error::BadDrawing(format!(
                "vertex label {v} outside 0..{total} for K_{{m,n}} labeling"
            )));
        }
    }
    let n = total - m;
    let mut seen = vec![false; (m * n) as usize];
    for e in &d.edges {
        let (b, r) = if e.0 < m && e.1 >= m {
            (e.0, e.1)
        } else if e.1 < m && e.0 >= m {
            (e.1, e.0)
        } else {
            return Err(Error::BadDrawing(format!(
                "edge ({},{}) does not join a blue to a red vertex",
                e.0, e.1
            )));
        };
        let slot = ((r - m) * m + b) as usize;
        if seen[slot] {
            return Err(Error::BadDrawing(format!("duplicate edge ({b},{r})")));
        }
        seen[slot] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::BadDrawing("drawing is not a complete K_{m,n}".into()));
    }
    Ok(())
}

/// Extracts the type of every red vertex from a K_{m,n} drawing (blue
/// labels 0..m-1, red labels m..m+n-1), normalizing first. Returned in red
/// label order m, m+1, ...
pub fn extract_types(d: &TwoPageDrawing, m: u32) -> Result<Vec<RedType>> {
    let d = normalize_kmn(d, m)?;
    let n = d.spine.len() as u32 - m;
    // blue order along the spine: blue_rank[label] = 0-based left-to-right index
    let mut blue_rank = vec![0u32; m as usize];
    let mut pos_of = vec![0usize; (m + n) as usize];
    let mut rank = 0;
    for (i, &v) in d.spine.iter().enumerate() {
        pos_of[v as usize] = i;
        if v < m {
            blue_rank[v as usize] = rank;
            rank += 1;
        }
    }
    let mut upper = vec![0u16; n as usize];
    for e in &d.edges {
        if e.2 == Page::Upper {
            let (b, r) = if e.0 < m { (e.0, e.1) } else { (e.1, e.0) };
            upper[(r - m) as usize] |= 1 << blue_rank[b as usize];
        }
    }
    let mut out = Vec::with_capacity(n as usize);
    for r in 0..n {
        let rpos = pos_of[(m + r) as usize];
        let blues_left = d.spine[..rpos].iter().filter(|&&v| v < m).count();
        debug_assert!(blues_left >= 1, "normalization guarantees a blue to the left");
        out.push(RedType {
            p: (blues_left - 1) as u8,
            upper: upper[r as usize],
        });
    }
    Ok(out)
}
