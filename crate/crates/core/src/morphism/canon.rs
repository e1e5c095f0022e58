//! Canonical labelling by partition refinement and individualization.
//!
//! The search tree depends only on the isomorphism type, so the least relabelled
//! edge list over its leaves is a complete invariant. Vertices with identical
//! links are exchanged by a transposition automorphism; only one of them is
//! individualized per cell.

use std::cmp::Ordering;

use serde::Serialize;

use crate::graph::{bits, edges_cmp, sort_edges, RGraph};

/// Equality, ordering and hashing ignore the automorphism count.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalForm {
    pub r: usize,
    pub n: usize,
    pub edges: Vec<u64>,
    /// Number of automorphisms, when the search that produced the form counts them.
    pub automorphisms: Option<u64>,
}

impl CanonicalForm {
    pub fn graph(&self) -> RGraph {
        RGraph::from_sorted_unchecked(self.r, self.n, self.edges.clone())
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        (self.r, self.n, self.edges.len())
            .cmp(&(other.r, other.n, other.edges.len()))
            .then_with(|| edges_cmp(&self.edges, &other.edges))
    }
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.n == other.n && self.edges == other.edges
    }
}

impl Eq for CanonicalForm {}

impl std::hash::Hash for CanonicalForm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.r, self.n, &self.edges).hash(state);
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

fn relabelled(h: &RGraph, perm: &[usize]) -> Vec<u64> {
    let mut e: Vec<u64> = h
        .edges()
        .iter()
        .map(|&e| bits(e).fold(0u64, |m, v| m | (1u64 << perm[v])))
        .collect();
    sort_edges(&mut e);
    e
}

struct Canon<'a> {
    h: &'a RGraph,
    incident: Vec<Vec<u64>>,
    twin: Vec<usize>,
    best: Option<Vec<u64>>,
}

impl Canon<'_> {
    /// Equitable refinement; colors are dense ranks `0..cells`.
    fn refine(&self, colors: &mut Vec<usize>) {
        let n = colors.len();
        let mut cells = count_cells(colors);
        loop {
            let sigs: Vec<(usize, Vec<Vec<usize>>)> = (0..n)
                .map(|v| {
                    let mut s: Vec<Vec<usize>> = self.incident[v]
                        .iter()
                        .map(|&e| {
                            let mut c: Vec<usize> = bits(e & !(1u64 << v)).map(|w| colors[w]).collect();
                            c.sort_unstable();
                            c
                        })
                        .collect();
                    s.sort_unstable();
                    (colors[v], s)
                })
                .collect();
            let mut sorted: Vec<&(usize, Vec<Vec<usize>>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            for v in 0..n {
                colors[v] = sorted.binary_search(&&sigs[v]).expect("signature present");
            }
            let now = sorted.len();
            if now == cells {
                return;
            }
            cells = now;
        }
    }

    fn search(&mut self, mut colors: Vec<usize>) {
        self.refine(&mut colors);
        let n = colors.len();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
            let e = relabelled(self.h, &colors);
            if self.best.as_ref().is_none_or(|b| edges_cmp(&e, b) == Ordering::Less) {
                self.best = Some(e);
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for v in 0..n {
            if colors[v] != target || tried.contains(&self.twin[v]) {
                continue;
            }
            tried.push(self.twin[v]);
            let child: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(w, &c)| if c > target || (c == target && w != v) { c + 1 } else { c })
                .collect();
            self.search(child);
        }
    }
}

fn count_cells(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

pub fn canonical_form(h: &RGraph) -> CanonicalForm {
    let n = h.n();
    let mut incident = vec![Vec::new(); n];
    for &e in h.edges() {
        for v in bits(e) {
            incident[v].push(e);
        }
    }
    let twin = h.equivalence_classes().assignment().to_vec();
    let mut c = Canon { h, incident, twin, best: None };
    c.search(vec![0; n]);
    CanonicalForm { r: h.r(), n, edges: c.best.unwrap_or_default(), automorphisms: None }
}

/// Least relabelled edge list over all `n!` relabelings, with the automorphism count.
///
/// Exponential; intended as a reference for small graphs.
pub fn canonical_form_exhaustive(h: &RGraph) -> CanonicalForm {
    let n = h.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = relabelled(h, &perm);
    let mut autos = 1u64;
    let original = h.edges().to_vec();
    // Heap's algorithm
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let e = relabelled(h, &perm);
            if e == original {
                autos += 1;
            }
            if edges_cmp(&e, &best) == Ordering::Less {
                best = e;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    CanonicalForm { r: h.r(), n, edges: best, automorphisms: Some(autos) }
}

pub fn is_isomorphic(a: &RGraph, b: &RGraph) -> bool {
    a.r() == b.r() && a.n() == b.n() && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}
