//! r-uniform hypergraphs on at most 64 labelled vertices.
//!
//! Edges are stored as `u64` bitmasks and kept sorted in lexicographic order
//! of their ascending vertex lists, so equal graphs have equal edge vectors.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;

/// Iterate the set bits of a mask in ascending order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

pub fn mask_of(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | (1u64 << v))
}

pub fn vertices_of(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

/// Mask with the lowest `n` bits set.
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Lexicographic comparison of two vertex sets of equal size.
///
/// The first position at which the ascending lists differ holds the lowest
/// vertex of the symmetric difference; the set owning it is the smaller one.
pub fn edge_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = a ^ b;
    let low = d & d.wrapping_neg();
    if a & low != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub fn edges_cmp(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match edge_cmp(*x, *y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub fn sort_edges(edges: &mut [u64]) {
    edges.sort_unstable_by(|a, b| edge_cmp(*a, *b));
}

/// All `k`-subsets of `universe`, in lexicographic order.
pub fn subsets_of(universe: u64, k: usize) -> Vec<u64> {
    fn rec(items: &[usize], k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k {
                break;
            }
            rec(items, k - 1, i + 1, acc | (1u64 << items[i]), out);
        }
    }
    let items: Vec<usize> = bits(universe).collect();
    let mut out = Vec::new();
    if k <= items.len() {
        rec(&items, k, 0, 0, &mut out);
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// An r-uniform hypergraph on the vertex set `{0, …, n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RGraph {
    r: usize,
    n: usize,
    edges: Vec<u64>,
}

impl PartialOrd for RGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.r
            .cmp(&other.r)
            .then(self.n.cmp(&other.n))
            .then(self.edges.len().cmp(&other.edges.len()))
            .then_with(|| edges_cmp(&self.edges, &other.edges))
    }
}

impl RGraph {
    /// Builds a graph from vertex lists. Vertex order inside an edge is irrelevant.
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        check_dims(r, n)?;
        let mut masks = Vec::new();
        for e in edges {
            let e = e.as_ref();
            let mut m = 0u64;
            for &v in e {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                m |= 1u64 << v;
            }
            if e.len() != r || m.count_ones() as usize != r {
                return Err(Error::BadEdge { edge: e.to_vec(), r });
            }
            masks.push(m);
        }
        Self::from_masks(r, n, masks)
    }

    /// Builds a graph from edge bitmasks, rejecting duplicates.
    pub fn from_masks(r: usize, n: usize, mut masks: Vec<u64>) -> Result<Self> {
        check_dims(r, n)?;
        let allowed = full_mask(n);
        for &m in &masks {
            if m & !allowed != 0 {
                let vertex = bits(m & !allowed).next().unwrap_or(n);
                return Err(Error::VertexOutOfRange { vertex, n });
            }
            if m.count_ones() as usize != r {
                return Err(Error::BadEdge { edge: vertices_of(m), r });
            }
        }
        sort_edges(&mut masks);
        if let Some(w) = masks.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(vertices_of(w[0])));
        }
        Ok(RGraph { r, n, edges: masks })
    }

    /// Like [`RGraph::from_masks`] but silently merges duplicate edges.
    pub(crate) fn from_masks_dedup(r: usize, n: usize, mut masks: Vec<u64>) -> Self {
        sort_edges(&mut masks);
        masks.dedup();
        debug_assert!(masks.iter().all(|m| m.count_ones() as usize == r && m & !full_mask(n) == 0));
        RGraph { r, n, edges: masks }
    }

    pub(crate) fn from_sorted_unchecked(r: usize, n: usize, edges: Vec<u64>) -> Self {
        RGraph { r, n, edges }
    }

    pub fn empty(r: usize, n: usize) -> Result<Self> {
        Self::from_masks(r, n, Vec::new())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges, |H|.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|&e| vertices_of(e)).collect()
    }

    pub fn vertex_mask(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn has_edge(&self, mask: u64) -> bool {
        self.edges.binary_search_by(|e| edge_cmp(*e, mask)).is_ok()
    }

    pub fn contains_edge(&self, vertices: &[usize]) -> bool {
        vertices.len() == self.r && self.has_edge(mask_of(vertices))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub(crate) fn check_set(&self, vs: &[usize]) -> Result<u64> {
        for &v in vs {
            self.check_vertex(v)?;
        }
        Ok(mask_of(vs))
    }

    /// Returns a copy with `mask` added. `mask` must be a valid, absent edge.
    pub fn with_edge(&self, mask: u64) -> RGraph {
        debug_assert!(mask.count_ones() as usize == self.r && !self.has_edge(mask));
        let pos = self
            .edges
            .binary_search_by(|e| edge_cmp(*e, mask))
            .unwrap_or_else(|p| p);
        let mut edges = self.edges.clone();
        edges.insert(pos, mask);
        RGraph { r: self.r, n: self.n, edges }
    }

    pub fn without_edge(&self, mask: u64) -> RGraph {
        RGraph {
            r: self.r,
            n: self.n,
            edges: self.edges.iter().copied().filter(|&e| e != mask).collect(),
        }
    }

    /// Returns a copy without the given edges.
    pub fn without_edges(&self, masks: &[u64]) -> RGraph {
        RGraph {
            r: self.r,
            n: self.n,
            edges: self.edges.iter().copied().filter(|e| !masks.contains(e)).collect(),
        }
    }

    /// Edges containing every vertex of `mask`.
    pub fn edges_through(&self, mask: u64) -> impl Iterator<Item = u64> + '_ {
        self.edges.iter().copied().filter(move |e| e & mask == mask)
    }

    pub fn degree(&self, v: usize) -> usize {
        let b = 1u64 << v;
        self.edges.iter().filter(|&&e| e & b != 0).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &e in &self.edges {
            for v in bits(e) {
                d[v] += 1;
            }
        }
        d
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees = self.degrees();
        let min_degree = degrees.iter().copied().min().unwrap_or(0);
        DegreeProfile { degrees, min_degree }
    }

    /// Minimum degree δ(H); 0 for the graph without vertices.
    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// `adj[v]` is the set of vertices sharing an edge with `v`, i.e. the
    /// neighbourhood of `v` in the pair shadow ∂_{r-2}H.
    pub fn pair_adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &e in &self.edges {
            for v in bits(e) {
                adj[v] |= e & !(1u64 << v);
            }
        }
        adj
    }

    /// The pair shadow as a 2-graph (the graph itself when r = 2).
    pub fn pair_shadow(&self) -> RGraph {
        let adj = self.pair_adjacency();
        let mut masks = Vec::new();
        for (u, &a) in adj.iter().enumerate() {
            for v in bits(a) {
                if v > u {
                    masks.push((1u64 << u) | (1u64 << v));
                }
            }
        }
        RGraph::from_masks_dedup(2, self.n, masks)
    }

    /// Link masks of `v`: the (r-1)-sets `A` with `A ∪ {v}` an edge.
    pub(crate) fn link_masks(&self, v: usize) -> Vec<u64> {
        let b = 1u64 << v;
        // removing the same bit from sorted edges keeps lexicographic order
        let mut out: Vec<u64> = self.edges.iter().filter(|&&e| e & b != 0).map(|&e| e ^ b).collect();
        sort_edges(&mut out);
        out
    }

    /// The link L_H(v) as an (r-1)-graph on the same vertex set.
    pub fn link(&self, v: usize) -> Result<RGraph> {
        self.check_vertex(v)?;
        if self.r < 2 {
            return Err(Error::InvalidParameter("link needs uniformity at least 2".into()));
        }
        Ok(RGraph { r: self.r - 1, n: self.n, edges: self.link_masks(v) })
    }

    /// The shadow ∂_i H: all (r-i)-sets covered by an edge.
    pub fn shadow(&self, i: usize) -> Result<RGraph> {
        if i < 1 || i + 1 > self.r {
            return Err(Error::InvalidParameter(format!(
                "shadow index {i} outside 1..={} for uniformity {}",
                self.r.saturating_sub(1),
                self.r
            )));
        }
        let k = self.r - i;
        let mut masks = Vec::new();
        for &e in &self.edges {
            masks.extend(subsets_of(e, k));
        }
        Ok(RGraph::from_masks_dedup(k, self.n, masks))
    }

    /// N_H(v): vertices other than `v` covered together with `v` by an edge.
    pub fn neighborhood(&self, v: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        Ok(vertices_of(self.pair_adjacency()[v]))
    }

    /// Partition into classes of identical links, classes ordered by least vertex.
    pub fn equivalence_classes(&self) -> VertexPartition {
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut assignment = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let next = index.len();
            let c = *index.entry(self.link_masks(v)).or_insert(next);
            assignment.push(c);
        }
        VertexPartition { class_count: index.len(), assignment }
    }

    /// Ψ(H) = Σ |C_i|² over equivalence classes.
    pub fn psi(&self) -> u64 {
        self.equivalence_classes().sizes().iter().map(|&s| (s * s) as u64).sum()
    }

    /// Every pair of non-equivalent vertices lies in a common edge.
    pub fn is_symmetrized(&self) -> bool {
        let classes = self.equivalence_classes();
        let adj = self.pair_adjacency();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if classes.class_of(u) != classes.class_of(v) && adj[u] & (1u64 << v) == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Every pair inside `set` is covered by an edge.
    pub fn is_two_covered(&self, set: &[usize]) -> Result<bool> {
        let mask = self.check_set(set)?;
        Ok(self.is_two_covered_mask(mask))
    }

    pub fn is_two_covered_mask(&self, mask: u64) -> bool {
        let adj = self.pair_adjacency();
        bits(mask).all(|v| (mask & !(1u64 << v)) & !adj[v] == 0)
    }

    /// The whole vertex set is 2-covered.
    pub fn is_fully_two_covered(&self) -> bool {
        self.is_two_covered_mask(self.vertex_mask())
    }

    /// Every `ell`-subset of the vertex set lies in at most one edge.
    pub fn is_design_system(&self, ell: usize) -> Result<bool> {
        if ell < 1 || ell > self.r {
            return Err(Error::InvalidParameter(format!("system parameter {ell} outside 1..={}", self.r)));
        }
        for (i, &a) in self.edges.iter().enumerate() {
            for &b in &self.edges[i + 1..] {
                if (a & b).count_ones() as usize >= ell {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Relabels vertices by `perm`, where `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<RGraph> {
        if perm.len() != self.n {
            return Err(Error::InvalidParameter("permutation length differs from vertex count".into()));
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= self.n || seen & (1u64 << p) != 0 {
                return Err(Error::InvalidParameter("relabeling is not a permutation".into()));
            }
            seen |= 1u64 << p;
        }
        Ok(self.relabel_unchecked(perm))
    }

    pub(crate) fn relabel_unchecked(&self, perm: &[usize]) -> RGraph {
        let mut edges: Vec<u64> = self
            .edges
            .iter()
            .map(|&e| bits(e).fold(0u64, |m, v| m | (1u64 << perm[v])))
            .collect();
        sort_edges(&mut edges);
        RGraph { r: self.r, n: self.n, edges }
    }

    /// H − S with the remaining vertices relabelled contiguously.
    pub fn delete_vertices(&self, set: &[usize]) -> Result<Subgraph> {
        let mask = self.check_set(set)?;
        Ok(self.induced_mask(self.vertex_mask() & !mask))
    }

    /// H[S] with vertices relabelled contiguously in ascending order.
    pub fn induced(&self, set: &[usize]) -> Result<Subgraph> {
        let mask = self.check_set(set)?;
        Ok(self.induced_mask(mask))
    }

    pub fn induced_mask(&self, keep: u64) -> Subgraph {
        let labels: Vec<usize> = bits(keep & self.vertex_mask()).collect();
        let mut new_of = [usize::MAX; MAX_VERTICES];
        for (i, &v) in labels.iter().enumerate() {
            new_of[v] = i;
        }
        let mut edges: Vec<u64> = self
            .edges
            .iter()
            .filter(|&&e| e & !keep == 0)
            .map(|&e| bits(e).fold(0u64, |m, v| m | (1u64 << new_of[v])))
            .collect();
        sort_edges(&mut edges);
        Subgraph { graph: RGraph { r: self.r, n: labels.len(), edges }, labels }
    }

    /// H − S keeping the original labels (the removed vertices become isolated).
    pub fn isolate_vertices_mask(&self, remove: u64) -> RGraph {
        RGraph {
            r: self.r,
            n: self.n,
            edges: self.edges.iter().copied().filter(|e| e & remove == 0).collect(),
        }
    }

    /// The blowup G[V_1, …, V_m] with |V_i| = `sizes[i]`; classes are consecutive blocks.
    pub fn blowup(&self, sizes: &[usize]) -> Result<(RGraph, VertexPartition)> {
        if sizes.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "blowup needs {} class sizes, got {}",
                self.n,
                sizes.len()
            )));
        }
        let total: usize = sizes.iter().sum();
        if total > MAX_VERTICES {
            return Err(Error::TooManyVertices(total));
        }
        let mut assignment = Vec::with_capacity(total);
        let mut blocks = Vec::with_capacity(self.n);
        for (i, &s) in sizes.iter().enumerate() {
            let start = assignment.len();
            blocks.push((start..start + s).collect::<Vec<usize>>());
            assignment.extend(std::iter::repeat_n(i, s));
        }
        let mut edges = Vec::new();
        for &e in &self.edges {
            let parts: Vec<&Vec<usize>> = bits(e).map(|i| &blocks[i]).collect();
            product_masks(&parts, 0, 0, &mut edges);
        }
        sort_edges(&mut edges);
        let graph = RGraph { r: self.r, n: total, edges };
        Ok((graph, VertexPartition { class_count: self.n, assignment }))
    }

    /// Graph on the same vertices containing the edges of both graphs.
    pub fn union(&self, other: &RGraph) -> Result<RGraph> {
        if self.r != other.r || self.n != other.n {
            return Err(Error::UniformityMismatch(self.r, other.r));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(RGraph::from_masks_dedup(self.r, self.n, edges))
    }

    /// Adds isolated vertices up to `n` vertices in total.
    pub fn padded(&self, n: usize) -> Result<RGraph> {
        if n < self.n {
            return Err(Error::InvalidParameter("cannot pad to fewer vertices".into()));
        }
        check_dims(self.r, n)?;
        Ok(RGraph { r: self.r, n, edges: self.edges.clone() })
    }

    /// Edge set is contained in the edge set of `other` (same vertex labels).
    pub fn is_subgraph_of(&self, other: &RGraph) -> bool {
        self.r == other.r && self.n <= other.n && self.edges.iter().all(|&e| other.has_edge(e))
    }
}

fn product_masks(parts: &[&Vec<usize>], i: usize, acc: u64, out: &mut Vec<u64>) {
    if i == parts.len() {
        out.push(acc);
        return;
    }
    for &v in parts[i] {
        product_masks(parts, i + 1, acc | (1u64 << v), out);
    }
}

fn check_dims(r: usize, n: usize) -> Result<()> {
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("uniformity must be positive".into()));
    }
    Ok(())
}

/// Result of deleting or inducing: the new graph and, for each new vertex, its old label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: RGraph,
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub min_degree: usize,
}

/// An ordered partition of `{0, …, n-1}` into `class_count` classes, some possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexPartition {
    class_count: usize,
    assignment: Vec<usize>,
}

impl VertexPartition {
    pub fn new(class_count: usize, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&c) = assignment.iter().find(|&&c| c >= class_count) {
            return Err(Error::InvalidParameter(format!("class index {c} >= class count {class_count}")));
        }
        Ok(VertexPartition { class_count, assignment })
    }

    /// Builds a partition of `{0, …, n-1}` from explicit classes.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (i, c) in classes.iter().enumerate() {
            for &v in c {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if assignment[v] != usize::MAX {
                    return Err(Error::InvalidParameter(format!("vertex {v} in two classes")));
                }
                assignment[v] = i;
            }
        }
        if let Some(v) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidParameter(format!("vertex {v} not assigned to a class")));
        }
        Ok(VertexPartition { class_count: classes.len(), assignment })
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn class_masks(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.class_count];
        for (v, &c) in self.assignment.iter().enumerate() {
            m[c] |= 1u64 << v;
        }
        m
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        self.class_masks().into_iter().map(vertices_of).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.class_count];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }

    /// Every edge meets every class in at most one vertex.
    pub fn is_rainbow_for(&self, h: &RGraph) -> bool {
        h.edges().iter().all(|&e| {
            let mut seen = 0u64;
            bits(e).all(|v| {
                let b = 1u64 << self.assignment[v];
                let fresh = seen & b == 0;
                seen |= b;
                fresh
            })
        })
    }
}
