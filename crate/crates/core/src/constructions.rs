//! Generators for the standard extremal configurations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{full_mask, mask_of, subsets_of, RGraph, VertexPartition, MAX_VERTICES};

/// Balanced part sizes, the first `n mod ℓ` parts one larger.
pub fn balanced_sizes(n: usize, parts: usize) -> Vec<usize> {
    if parts == 0 {
        return Vec::new();
    }
    (0..parts).map(|i| n / parts + usize::from(i < n % parts)).collect()
}

/// Partition of `0..Σsizes` into consecutive blocks.
pub fn block_partition(sizes: &[usize]) -> VertexPartition {
    let assignment = sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect();
    VertexPartition::new(sizes.len(), assignment).expect("indices below class count")
}

/// Complete multipartite r-graph: all r-sets meeting each block at most once.
pub fn complete_multipartite(r: usize, sizes: &[usize]) -> Result<RGraph> {
    let n: usize = sizes.iter().sum();
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    let p = block_partition(sizes);
    let edges = subsets_of(full_mask(n), r)
        .into_iter()
        .filter(|&e| {
            let mut seen = 0u64;
            crate::graph::bits(e).all(|v| {
                let b = 1u64 << p.class_of(v);
                let fresh = seen & b == 0;
                seen |= b;
                fresh
            })
        })
        .collect();
    RGraph::from_masks(r, n, edges)
}

/// T(n, ℓ).
pub fn turan_graph(n: usize, parts: usize) -> Result<RGraph> {
    if parts == 0 {
        return Err(Error::InvalidParameter("Turán graph needs at least one part".into()));
    }
    complete_multipartite(2, &balanced_sizes(n, parts))
}

/// T_r(n, ℓ), the balanced complete ℓ-partite r-graph.
pub fn turan_rgraph(n: usize, parts: usize, r: usize) -> Result<RGraph> {
    if parts < r {
        return Err(Error::InvalidParameter(format!("T_r(n, ℓ) needs ℓ ≥ r, got ℓ = {parts}, r = {r}")));
    }
    complete_multipartite(r, &balanced_sizes(n, parts))
}

/// K^r_ℓ.
pub fn complete(l: usize, r: usize) -> Result<RGraph> {
    if l > MAX_VERTICES {
        return Err(Error::TooManyVertices(l));
    }
    RGraph::from_masks(r, l, subsets_of(full_mask(l), r))
}

/// T_r: edges `B = I ∪ {r−1}`, `C = I ∪ {r}` with `I = {0, …, r−2}`, and `A = {r−1, …, 2r−2}`.
pub fn gen_triangle(r: usize) -> Result<RGraph> {
    if r < 2 {
        return Err(Error::InvalidParameter("generalized triangle needs r ≥ 2".into()));
    }
    let i: Vec<usize> = (0..r - 1).collect();
    let b: Vec<usize> = i.iter().copied().chain([r - 1]).collect();
    let c: Vec<usize> = i.iter().copied().chain([r]).collect();
    let a: Vec<usize> = (r - 1..2 * r - 1).collect();
    RGraph::new(r, 2 * r - 1, [a, b, c])
}

/// H^F_ℓ: `F` on `ℓ` vertices plus, for every pair not covered in `F` (in
/// lexicographic order), an edge through the pair and `r − 2` fresh vertices.
pub fn expansion(f: &RGraph, l: usize) -> Result<RGraph> {
    if l < f.n() {
        return Err(Error::InvalidParameter(format!("expansion order {l} below v(F) = {}", f.n())));
    }
    let r = f.r();
    let adj = f.pair_adjacency();
    let mut edges = f.edges().to_vec();
    let mut next = l;
    for u in 0..l {
        for v in (u + 1)..l {
            let covered = u < f.n() && adj[u] & (1u64 << v) != 0;
            if covered {
                continue;
            }
            if next + r - 2 > MAX_VERTICES {
                return Err(Error::TooManyVertices(next + r - 2));
            }
            let fresh = full_mask(next + r - 2) & !full_mask(next);
            edges.push((1u64 << u) | (1u64 << v) | fresh);
            next += r - 2;
        }
    }
    RGraph::from_masks(r, next, edges)
}

/// B(r, ℓ+1) on `{0, …, ℓ}`: the edge `{0, …, r−1}` and all r-subsets of
/// `{1, …, ℓ}` meeting `{1, …, r−1}` in at most one vertex.
pub fn b_graph(r: usize, l1: usize) -> Result<RGraph> {
    if r < 2 || l1 < r + 1 {
        return Err(Error::InvalidParameter(format!("B(r, ℓ+1) needs r ≥ 2 and ℓ ≥ r, got r = {r}, ℓ+1 = {l1}")));
    }
    let head = full_mask(r) & !1;
    let mut edges = vec![full_mask(r)];
    for e in subsets_of(full_mask(l1) & !1, r) {
        if (e & head).count_ones() <= 1 {
            edges.push(e);
        }
    }
    RGraph::from_masks(r, l1, edges)
}

/// M^r_t, `t` pairwise disjoint edges.
pub fn matching(r: usize, t: usize) -> Result<RGraph> {
    let n = r * t;
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    RGraph::from_masks(r, n, (0..t).map(|i| full_mask(r) << (i * r)).collect())
}

/// L^r_t, `t` edges pairwise meeting exactly in vertex 0.
pub fn sunflower(r: usize, t: usize) -> Result<RGraph> {
    if r < 2 {
        return Err(Error::InvalidParameter("sunflower needs r ≥ 2".into()));
    }
    let n = 1 + t * (r - 1);
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    RGraph::from_masks(r, n, (0..t).map(|i| 1 | (full_mask(r - 1) << (1 + i * (r - 1)))).collect())
}

/// All `a·C(b, r−1)` edges meeting `A = {0, …, a−1}` exactly once.
pub fn complete_semibipartite(a: usize, b: usize, r: usize) -> Result<RGraph> {
    if r < 2 {
        return Err(Error::InvalidParameter("semibipartite graphs need r ≥ 2".into()));
    }
    let n = a + b;
    if n > MAX_VERTICES {
        return Err(Error::TooManyVertices(n));
    }
    let side_b = full_mask(n) & !full_mask(a);
    let mut edges = Vec::new();
    for v in 0..a {
        for s in subsets_of(side_b, r - 1) {
            edges.push(s | (1u64 << v));
        }
    }
    RGraph::from_masks(r, n, edges)
}

/// T⁺(n, ℓ): T(n, ℓ) with the edge `{0, 1}` added inside the first part.
pub fn turan_plus(n: usize, parts: usize) -> Result<RGraph> {
    let t = turan_graph(n, parts)?;
    if balanced_sizes(n, parts)[0] < 2 {
        return Err(Error::InvalidParameter("T⁺(n, ℓ) needs a part with two vertices".into()));
    }
    Ok(t.with_edge(mask_of(&[0, 1])))
}

/// The cycle C_n on `0, 1, …, n−1`.
pub fn cycle(n: usize) -> Result<RGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycles need at least 3 vertices".into()));
    }
    RGraph::new(2, n, (0..n).map(|i| [i, (i + 1) % n]))
}

/// Tags for the named constructions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum NamedConstruction {
    TuranGraph { n: usize, l: usize },
    TuranRGraph { n: usize, l: usize, r: usize },
    CompleteR { l: usize, r: usize },
    GenTriangle { r: usize },
    /// Expansion of the edgeless r-graph on `l` vertices.
    EmptyExpansion { r: usize, l: usize },
    BGraph { r: usize, l1: usize },
    Matching { r: usize, t: usize },
    Sunflower { r: usize, t: usize },
    CompleteSemibipartite { a: usize, b: usize, r: usize },
    TuranPlus { n: usize, l: usize },
    Cycle { n: usize },
}

impl NamedConstruction {
    pub fn build(&self) -> Result<RGraph> {
        match *self {
            NamedConstruction::TuranGraph { n, l } => turan_graph(n, l),
            NamedConstruction::TuranRGraph { n, l, r } => turan_rgraph(n, l, r),
            NamedConstruction::CompleteR { l, r } => complete(l, r),
            NamedConstruction::GenTriangle { r } => gen_triangle(r),
            NamedConstruction::EmptyExpansion { r, l } => expansion(&RGraph::empty(r, l)?, l),
            NamedConstruction::BGraph { r, l1 } => b_graph(r, l1),
            NamedConstruction::Matching { r, t } => matching(r, t),
            NamedConstruction::Sunflower { r, t } => sunflower(r, t),
            NamedConstruction::CompleteSemibipartite { a, b, r } => complete_semibipartite(a, b, r),
            NamedConstruction::TuranPlus { n, l } => turan_plus(n, l),
            NamedConstruction::Cycle { n } => cycle(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{detect_sigma, is_isomorphic};

    #[test]
    fn turan_graphs() {
        let t52 = turan_graph(5, 2).unwrap();
        assert_eq!(t52.edge_count(), 6);
        assert_eq!(t52.equivalence_classes().sizes(), vec![3, 2]);
        assert_eq!(turan_graph(6, 3).unwrap().edge_count(), 12);
        assert_eq!(turan_graph(3, 3).unwrap(), complete(3, 2).unwrap());
        for n in 0usize..12 {
            for l in 1usize..6 {
                let want = (n * n - (n % l) * (n / l + 1).pow(2) - (l - n % l) * (n / l).pow(2)) / 2;
                assert_eq!(turan_graph(n, l).unwrap().edge_count(), want);
            }
        }
    }

    #[test]
    fn turan_rgraphs() {
        assert_eq!(turan_rgraph(6, 3, 3).unwrap().edge_count(), 8);
        assert_eq!(turan_rgraph(5, 3, 3).unwrap().edge_count(), 4);
        assert_eq!(turan_rgraph(5, 5, 3).unwrap(), complete(5, 3).unwrap());
        assert!(turan_rgraph(5, 2, 3).is_err());
    }

    #[test]
    fn generalized_triangles() {
        assert!(is_isomorphic(&gen_triangle(2).unwrap(), &complete(3, 2).unwrap()));
        let t3 = gen_triangle(3).unwrap();
        assert!(is_isomorphic(&t3, &RGraph::new(3, 5, [[0, 1, 2], [0, 1, 3], [2, 3, 4]]).unwrap()));
        assert!(detect_sigma(&t3).is_some());
        for r in 2..=6 {
            let t = gen_triangle(r).unwrap();
            assert_eq!(t.n(), 2 * r - 1);
            assert_eq!(t.edge_count(), 3);
        }
    }

    #[test]
    fn expansions() {
        let h = expansion(&RGraph::empty(3, 4).unwrap(), 4).unwrap();
        assert_eq!(h.n(), 10);
        assert_eq!(h.edge_count(), 6);
        assert!(h.is_two_covered(&[0, 1, 2, 3]).unwrap());
        let m = matching(3, 2).unwrap();
        let hm = expansion(&m, 6).unwrap();
        assert_eq!(hm.n(), 6 + 9);
        assert!(hm.is_two_covered(&(0..6).collect::<Vec<_>>()).unwrap());
        assert!(expansion(&m, 5).is_err());
    }

    #[test]
    fn b_graph_matches_definition() {
        let b = b_graph(3, 5).unwrap();
        assert_eq!(b.edge_lists(), vec![vec![0, 1, 2], vec![1, 3, 4], vec![2, 3, 4]]);
        for (r, l1) in [(3, 6), (4, 6), (4, 7), (2, 4)] {
            let g = b_graph(r, l1).unwrap();
            let mut want = vec![(0..r).collect::<Vec<_>>()];
            for e in subsets_of(full_mask(l1), r) {
                let e = crate::graph::vertices_of(e);
                if !e.contains(&0) && e.iter().filter(|&&v| (1..r).contains(&v)).count() <= 1 {
                    want.push(e);
                }
            }
            want.sort();
            assert_eq!(g.edge_lists(), want);
        }
    }

    #[test]
    fn matchings_sunflowers_semibipartite() {
        let s = sunflower(4, 3).unwrap();
        assert_eq!(s.degree(0), 3);
        assert!(s.is_design_system(3).unwrap());
        assert!(matching(3, 3).unwrap().is_design_system(2).unwrap());
        let sb = complete_semibipartite(2, 4, 3).unwrap();
        assert_eq!(sb.edge_count(), 12);
        let tp = turan_plus(6, 2).unwrap();
        assert_eq!(tp.edge_count(), 10);
        assert!(tp.contains_edge(&[0, 1]));
        assert_eq!(cycle(5).unwrap().edge_count(), 5);
    }
}
