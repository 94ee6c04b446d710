//! The chord-intersection graph G_n and the conjectured crossing-number values.
//!
//! Vertices of G_n are the chords of an n-cycle (vertex pairs at cyclic
//! distance >= 2, so |V_n| = C(n,2) - n) and two chords are adjacent exactly
//! when they cross, which gives |E_n| = C(n,4): every 4-subset of cycle
//! vertices produces exactly one crossing chord pair. Cutting G_n into the
//! chords drawn inside/outside the circle turns 2-page drawings of K_n into
//! cuts, so nu2(K_n) = C(n,4) - maxcut(G_n).
//!
//! Cycle vertices are 0-based {0..n-1} throughout.

use crate::{binomial, Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;

/// A chord of the n-cycle: endpoints `a < b` at cyclic distance >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chord {
    pub a: u32,
    pub b: u32,
    /// Cyclic distance min((b-a) mod n, (a-b) mod n); the orbit of the chord
    /// under the dihedral automorphism group of G_n.
    pub dist: u32,
}

impl Chord {
    /// Canonicalizes endpoints (stored with `a < b`) and computes the
    /// cyclic distance. Rejects cycle edges and loops.
    pub fn new(a: u32, b: u32, n: u32) -> Result<Chord> {
        if a >= n || b >= n {
            return Err(Error::InvalidParameter(format!(
                "chord endpoint out of range: ({a},{b}) with n={n}"
            )));
        }
        if a == b {
            return Err(Error::InvalidParameter(format!("degenerate chord ({a},{a})")));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let dist = (b - a).min(n - (b - a));
        if dist < 2 {
            return Err(Error::InvalidParameter(format!(
                "({a},{b}) is a cycle edge of C_{n}, not a chord"
            )));
        }
        Ok(Chord { a, b, dist })
    }
}

/// Do two chords of the n-cycle cross?
///
/// True iff the four endpoints are distinct and exactly one endpoint of `c2`
/// lies strictly inside the cyclic arc (c1.a .. c1.b). Chords sharing an
/// endpoint never cross.
pub fn chords_cross(c1: &Chord, c2: &Chord, n: u32) -> bool {
    if c1.a == c2.a || c1.a == c2.b || c1.b == c2.a || c1.b == c2.b {
        return false;
    }
    let inside = |x: u32| -> bool {
        // strictly inside the arc walked from c1.a upward to c1.b
        let rel = (x + n - c1.a) % n;
        let span = c1.b - c1.a;
        rel > 0 && rel < span
    };
    inside(c2.a) != inside(c2.b)
}

/// The chord-intersection graph G_n with dense bitset adjacency.
#[derive(Debug, Clone)]
pub struct ChordGraph {
    n: u32,
    chords: Vec<Chord>,
    index: HashMap<(u32, u32), usize>,
    /// Row-major bitset adjacency; `words` u64 words per row.
    rows: Vec<u64>,
    words: usize,
    degrees: Vec<u32>,
    edge_count: u64,
}

impl ChordGraph {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.chords.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Chords in canonical order: sorted by (dist, a).
    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    /// Index of a chord given by its endpoints (any order).
    pub fn chord_index(&self, a: u32, b: u32) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.index.get(&key).copied()
    }

    /// Orbit of chord `i` under Aut(G_n): its cyclic distance class.
    pub fn orbit_of(&self, i: usize) -> u32 {
        self.chords[i].dist
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    /// Bitset row of neighbours of `i` (`words()` u64 words).
    pub fn neighbor_row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// All edges as index pairs i < j.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        for i in 0..self.vertex_count() {
            for j in (i + 1)..self.vertex_count() {
                if self.are_adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Number of distance orbits, d - 1 with d = floor(n/2).
    pub fn orbit_count(&self) -> u32 {
        self.n / 2 - 1
    }

    /// Edge-list export: header `p maxcut <#vertices> <#edges>` then one
    /// 0-based `u v` pair per line. Interoperates with external max-cut
    /// solvers.
    pub fn export_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p maxcut {} {}", self.vertex_count(), self.edge_count);
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Laplacian as a real dense matrix (row-major), for spectral bounds.
    pub fn laplacian(&self) -> Vec<f64> {
        let p = self.vertex_count();
        let mut l = vec![0.0; p * p];
        for i in 0..p {
            l[i * p + i] = self.degrees[i] as f64;
            for j in 0..p {
                if self.are_adjacent(i, j) {
                    l[i * p + j] = -1.0;
                }
            }
        }
        l
    }
}

/// Builds G_n: all chords of the n-cycle in canonical (dist, a) order, with
/// adjacency between every interleaving pair.
pub fn build_chord_graph(n: u32) -> Result<ChordGraph> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "G_n needs n >= 4, got {n}"
        )));
    }
    let mut chords = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let dist = (b - a).min(n - (b - a));
            if dist >= 2 {
                chords.push(Chord { a, b, dist });
            }
        }
    }
    chords.sort_by_key(|c| (c.dist, c.a));
    let expected = binomial(n as u64, 2) as usize - n as usize;
    debug_assert_eq!(chords.len(), expected);

    let p = chords.len();
    let words = p.div_ceil(64);
    let mut rows = vec![0u64; p * words];
    let mut degrees = vec![0u32; p];
    let mut edge_count = 0u64;
    for i in 0..p {
        for j in (i + 1)..p {
            if chords_cross(&chords[i], &chords[j], n) {
                rows[i * words + j / 64] |= 1 << (j % 64);
                rows[j * words + i / 64] |= 1 << (i % 64);
                degrees[i] += 1;
                degrees[j] += 1;
                edge_count += 1;
            }
        }
    }
    let index = chords
        .iter()
        .enumerate()
        .map(|(i, c)| ((c.a, c.b), i))
        .collect();
    Ok(ChordGraph {
        n,
        chords,
        index,
        rows,
        words,
        degrees,
        edge_count,
    })
}

/// Z(n) = (1/4) floor(n/2) floor((n-1)/2) floor((n-2)/2) floor((n-3)/2),
/// the conjectured value of the crossing number of K_n.
pub fn zeta_complete(n: u64) -> u64 {
    let prod = (n / 2) as u128
        * (n.saturating_sub(1) / 2) as u128
        * (n.saturating_sub(2) / 2) as u128
        * (n.saturating_sub(3) / 2) as u128;
    (prod / 4) as u64
}

/// Z(m,n) = floor(n/2) floor((n-1)/2) floor(m/2) floor((m-1)/2), the
/// conjectured (Zarankiewicz) crossing number of K_{m,n}.
pub fn zeta_bipartite(m: u64, n: u64) -> u64 {
    let prod = (n / 2) as u128
        * (n.saturating_sub(1) / 2) as u128
        * (m / 2) as u128
        * (m.saturating_sub(1) / 2) as u128;
    prod as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g5_is_a_five_cycle() {
        let g = build_chord_graph(5).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        for i in 0..5 {
            assert_eq!(g.degree(i), 2);
        }
    }

    #[test]
    fn g4_two_diagonals_one_edge() {
        let g = build_chord_graph(4).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn g13_counts() {
        let g = build_chord_graph(13).unwrap();
        assert_eq!(g.vertex_count(), 65);
        assert_eq!(g.edge_count(), 715);
    }

    #[test]
    fn rejects_small_n() {
        assert!(build_chord_graph(3).is_err());
    }

    #[test]
    fn cross_examples() {
        // v1v3 and v2v5 of the 5-cycle, relabeled 0-based: {0,2} vs {1,4}
        let n = 5;
        let c1 = Chord::new(0, 2, n).unwrap();
        let c2 = Chord::new(1, 4, n).unwrap();
        assert!(chords_cross(&c1, &c2, n));

        let c1 = Chord::new(0, 2, 6).unwrap();
        let c2 = Chord::new(3, 5, 6).unwrap();
        assert!(!chords_cross(&c1, &c2, 6));

        // sharing an endpoint never crosses
        let c1 = Chord::new(0, 3, 7).unwrap();
        let c2 = Chord::new(3, 5, 7).unwrap();
        assert!(!chords_cross(&c1, &c2, 7));
    }

    #[test]
    fn crossing_pairs_match_binomial_identity() {
        // brute-force pair count must equal C(n,4)
        for n in 4..=30u32 {
            let g = build_chord_graph(n).unwrap();
            let mut count = 0u64;
            for i in 0..g.vertex_count() {
                for j in (i + 1)..g.vertex_count() {
                    if chords_cross(&g.chords()[i], &g.chords()[j], n) {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, binomial(n as u64, 4) as u64, "n={n}");
            assert_eq!(g.edge_count(), count);
            assert_eq!(
                g.vertex_count() as u128,
                binomial(n as u64, 2) - n as u128,
                "n={n}"
            );
        }
    }

    #[test]
    fn valency_formula() {
        // True degree of a distance-i chord is (i-1)(n-i-1). For odd n this
        // equals the dihedral-orbit form i(i-1) + 2(i-1)(d-i) with d = n/2;
        // for even n that form overcounts (long chords see both arcs
        // asymmetrically), so it is asserted for odd n only.
        for n in 4..=30u32 {
            let g = build_chord_graph(n).unwrap();
            let d = n / 2;
            for v in 0..g.vertex_count() {
                let i = g.orbit_of(v);
                assert_eq!(g.degree(v), (i - 1) * (n - i - 1), "n={n} i={i}");
                if n % 2 == 1 {
                    assert_eq!(g.degree(v), i * (i - 1) + 2 * (i - 1) * (d - i));
                }
            }
            assert_eq!(g.orbit_count(), d - 1);
        }
    }

    #[test]
    fn chords_cross_symmetry_and_rotation_invariance() {
        let n = 11;
        let g = build_chord_graph(n).unwrap();
        let cs = g.chords();
        for i in 0..cs.len() {
            for j in 0..cs.len() {
                let x = chords_cross(&cs[i], &cs[j], n);
                assert_eq!(x, chords_cross(&cs[j], &cs[i], n));
                // rotate both chords by 3, reflect via x -> n-1-x
                let rot = |c: &Chord, f: &dyn Fn(u32) -> u32| {
                    Chord::new(f(c.a), f(c.b), n).unwrap()
                };
                let shift = |x: u32| (x + 3) % n;
                let refl = |x: u32| (n - 1 - x) % n;
                assert_eq!(x, chords_cross(&rot(&cs[i], &shift), &rot(&cs[j], &shift), n));
                assert_eq!(x, chords_cross(&rot(&cs[i], &refl), &rot(&cs[j], &refl), n));
            }
        }
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_complete(13), 225);
        assert_eq!(zeta_complete(4), 0);
        assert_eq!(zeta_complete(5), 1);
        assert_eq!(zeta_complete(6), 3);
        assert_eq!(zeta_complete(7), 9);
        assert_eq!(zeta_complete(9), 36);
        assert_eq!(zeta_complete(11), 100);
        assert_eq!(zeta_complete(14), 315);
        assert_eq!(zeta_bipartite(7, 10), 180); // 3*3*4*5
        assert_eq!(zeta_bipartite(5, 6), 24);
        assert_eq!(zeta_bipartite(2, 100), 0);
    }

    #[test]
    fn zeta_odd_even_consistency() {
        // Z(2k+2) = Z(2k+1) * (2k+2)/(2k-2) for k >= 2
        for k in 2..=40u64 {
            let odd = zeta_complete(2 * k + 1);
            let even = zeta_complete(2 * k + 2);
            assert_eq!(even * (2 * k - 2), odd * (2 * k + 2), "k={k}");
        }
    }

    #[test]
    fn edge_list_export_format() {
        let g = build_chord_graph(5).unwrap();
        let s = g.export_edge_list();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("p maxcut 5 5"));
        assert_eq!(lines.count(), 5);
    }
}
