//! Chromatic numbers, K^r_ℓ-colorings, semibipartitions and criticality.

use crate::error::{Error, Result};
use crate::graph::{bits, full_mask, RGraph, VertexPartition};

fn require_graph(g: &RGraph) -> Result<()> {
    if g.r() == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("expected a graph, got uniformity {}", g.r())))
    }
}

/// Proper coloring of the adjacency masks with at most `k` colors, by DSATUR backtracking.
pub(crate) fn color_with(adj: &[u64], k: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut colors = vec![usize::MAX; n];
    fn rec(adj: &[u64], k: usize, colors: &mut Vec<usize>, left: usize, used: usize) -> bool {
        if left == 0 {
            return true;
        }
        let n = adj.len();
        let mut pick = usize::MAX;
        let mut key = (0usize, 0u32);
        for v in 0..n {
            if colors[v] != usize::MAX {
                continue;
            }
            let mut seen = 0u64;
            for w in bits(adj[v]) {
                if colors[w] != usize::MAX {
                    seen |= 1u64 << colors[w];
                }
            }
            let sat = seen.count_ones() as usize;
            let k2 = (sat, adj[v].count_ones());
            if pick == usize::MAX || k2 > key {
                pick = v;
                key = k2;
            }
        }
        let v = pick;
        let mut forbidden = 0u64;
        for w in bits(adj[v]) {
            if colors[w] != usize::MAX {
                forbidden |= 1u64 << colors[w];
            }
        }
        // a fresh color is interchangeable with any other fresh one
        for c in 0..k.min(used + 1) {
            if forbidden & (1u64 << c) != 0 {
                continue;
            }
            colors[v] = c;
            if rec(adj, k, colors, left - 1, used.max(c + 1)) {
                return true;
            }
        }
        colors[v] = usize::MAX;
        false
    }
    if n == 0 {
        return Some(colors);
    }
    if k == 0 {
        return None;
    }
    rec(adj, k.min(64), &mut colors, n, 0).then_some(colors)
}

fn greedy_clique(adj: &[u64]) -> usize {
    let n = adj.len();
    let mut best = usize::from(n > 0);
    for start in 0..n {
        let mut clique = 1u64 << start;
        let mut cand = adj[start];
        while cand != 0 {
            let v = bits(cand).max_by_key(|&v| (adj[v] & cand).count_ones()).expect("nonempty");
            clique |= 1u64 << v;
            cand &= adj[v];
        }
        best = best.max(clique.count_ones() as usize);
    }
    best
}

pub(crate) fn chromatic_of(adj: &[u64]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    let mut k = greedy_clique(adj);
    while color_with(adj, k).is_none() {
        k += 1;
    }
    k
}

/// χ(G), exactly.
pub fn chromatic_number(g: &RGraph) -> Result<usize> {
    require_graph(g)?;
    Ok(chromatic_of(&g.pair_adjacency()))
}

/// A partition into at most `ℓ` classes (some possibly empty) meeting every edge
/// at most once, or `None`.
///
/// Every pair inside an edge is an edge of the pair shadow, and every shadow edge
/// lies inside an edge; so rainbow partitions are exactly proper colorings of
/// ∂_{r−2}H.
pub fn is_krl_colorable(h: &RGraph, l: usize) -> Result<Option<VertexPartition>> {
    if l < h.r() {
        return Err(Error::InvalidParameter(format!("K^r_ℓ-colorability needs ℓ ≥ r, got ℓ = {l}, r = {}", h.r())));
    }
    Ok(color_with(&h.pair_adjacency(), l).map(|c| VertexPartition::new(l, c).expect("colors below ℓ")))
}

/// Rainbow partition into at most `ℓ` classes by backtracking directly on edges.
pub fn rainbow_partition_direct(h: &RGraph, l: usize) -> Option<VertexPartition> {
    let n = h.n();
    let mut colors = vec![usize::MAX; n];
    // edges whose largest vertex is v are checked when v is colored
    let mut closing: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &e in h.edges() {
        closing[63 - e.leading_zeros() as usize].push(e);
    }
    fn rec(v: usize, l: usize, used: usize, colors: &mut Vec<usize>, closing: &[Vec<u64>]) -> bool {
        if v == colors.len() {
            return true;
        }
        for c in 0..l.min(used + 1) {
            colors[v] = c;
            let ok = closing[v].iter().all(|&e| {
                let mut seen = 0u64;
                bits(e).all(|w| {
                    let b = 1u64 << colors[w];
                    let fresh = seen & b == 0;
                    seen |= b;
                    fresh
                })
            });
            if ok && rec(v + 1, l, used.max(c + 1), colors, closing) {
                return true;
            }
        }
        colors[v] = usize::MAX;
        false
    }
    if l == 0 {
        return (n == 0).then(|| VertexPartition::new(0, Vec::new()).expect("empty"));
    }
    rec(0, l, 0, &mut colors, &closing).then(|| VertexPartition::new(l, colors).expect("colors below ℓ"))
}

/// A partition `(A, B)` with every edge meeting `A` exactly once, or `None`.
pub fn is_semibipartite(h: &RGraph) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = h.n();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &e) in h.edges().iter().enumerate() {
        for v in bits(e) {
            incident[v].push(i);
        }
    }
    // isolated vertices go to B
    let a = 0u64;
    let b = (0..n).filter(|&v| incident[v].is_empty()).fold(0u64, |m, v| m | (1u64 << v));
    fn propagate(h: &RGraph, a: &mut u64, b: &mut u64) -> bool {
        loop {
            let mut changed = false;
            for &e in h.edges() {
                let in_a = (e & *a).count_ones();
                let free = e & !*a & !*b;
                if in_a > 1 || (in_a == 0 && free == 0) {
                    return false;
                }
                if in_a == 1 && free != 0 {
                    *b |= free;
                    changed = true;
                } else if in_a == 0 && free.count_ones() == 1 {
                    *a |= free;
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }
    fn rec(h: &RGraph, mut a: u64, mut b: u64) -> Option<u64> {
        if !propagate(h, &mut a, &mut b) {
            return None;
        }
        let free = full_mask(h.n()) & !a & !b;
        if free == 0 {
            return Some(a);
        }
        let v = free.trailing_zeros();
        rec(h, a | (1u64 << v), b).or_else(|| rec(h, a, b | (1u64 << v)))
    }
    rec(h, a, b).map(|a| {
        let side_a: Vec<usize> = bits(a).collect();
        let side_b: Vec<usize> = (0..n).filter(|v| a & (1u64 << v) == 0).collect();
        (side_a, side_b)
    })
}

/// Some edge `e` has `χ(F − e) < χ(F)`.
pub fn is_edge_critical(f: &RGraph) -> Result<bool> {
    require_graph(f)?;
    let chi = chromatic_number(f)?;
    Ok(f.edges().iter().any(|&e| chromatic_of(&f.without_edge(e).pair_adjacency()) < chi))
}

/// Some matching `M` has `χ(F − M) < χ(F)`.
pub fn is_matching_critical(f: &RGraph) -> Result<bool> {
    require_graph(f)?;
    let chi = chromatic_number(f)?;
    fn rec(f: &RGraph, i: usize, used: u64, chosen: &mut Vec<u64>, chi: usize) -> bool {
        if i == f.edge_count() {
            return !chosen.is_empty() && chromatic_of(&f.without_edges(chosen).pair_adjacency()) < chi;
        }
        let e = f.edges()[i];
        if e & used == 0 {
            chosen.push(e);
            if rec(f, i + 1, used | e, chosen, chi) {
                return true;
            }
            chosen.pop();
        }
        rec(f, i + 1, used, chosen, chi)
    }
    Ok(rec(f, 0, 0, &mut Vec::new(), chi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{complete, complete_semibipartite, cycle, expansion, turan_graph, turan_rgraph};

    #[test]
    fn chromatic_numbers() {
        assert_eq!(chromatic_number(&cycle(5).unwrap()).unwrap(), 3);
        assert_eq!(chromatic_number(&complete(4, 2).unwrap()).unwrap(), 4);
        assert_eq!(chromatic_number(&turan_graph(7, 3).unwrap()).unwrap(), 3);
        assert_eq!(chromatic_number(&RGraph::empty(2, 3).unwrap()).unwrap(), 1);
        assert_eq!(chromatic_number(&RGraph::empty(2, 0).unwrap()).unwrap(), 0);
        assert!(chromatic_number(&complete(4, 3).unwrap()).is_err());
        // Grötzsch-free check: complement of C_7 has χ = 4
        let c7 = cycle(7).unwrap();
        let comp: Vec<u64> = crate::graph::subsets_of(full_mask(7), 2).into_iter().filter(|&e| !c7.has_edge(e)).collect();
        assert_eq!(chromatic_number(&RGraph::from_masks(2, 7, comp).unwrap()).unwrap(), 4);
    }

    #[test]
    fn krl_colorings() {
        let t = turan_rgraph(7, 3, 3).unwrap();
        let p = is_krl_colorable(&t, 3).unwrap().unwrap();
        assert!(p.is_rainbow_for(&t));
        let mut got = p.classes();
        got.sort();
        assert_eq!(got, t.equivalence_classes().classes());
        assert!(is_krl_colorable(&complete(4, 3).unwrap(), 3).unwrap().is_none());
        let h34 = expansion(&RGraph::empty(3, 4).unwrap(), 4).unwrap();
        assert!(is_krl_colorable(&h34, 3).unwrap().is_none());
        assert!(is_krl_colorable(&h34, 2).is_err());
        assert!(is_krl_colorable(&cycle(5).unwrap(), 2).unwrap().is_none());
    }

    #[test]
    fn semibipartitions() {
        let sb = complete_semibipartite(2, 4, 3).unwrap();
        let (a, b) = is_semibipartite(&sb).unwrap();
        for e in sb.edge_lists() {
            assert_eq!(e.iter().filter(|v| a.contains(v)).count(), 1);
        }
        assert_eq!(a.len() + b.len(), 6);
        assert!(is_semibipartite(&complete(4, 3).unwrap()).is_none());
        assert_eq!(is_semibipartite(&RGraph::empty(3, 3).unwrap()), Some((vec![], vec![0, 1, 2])));
        // exhaustive oracle on all 3-graphs with 4 vertices
        let all = crate::graph::subsets_of(full_mask(4), 3);
        for m in 0u32..16 {
            let e: Vec<u64> = (0..4).filter(|i| m & (1 << i) != 0).map(|i| all[i]).collect();
            let h = RGraph::from_masks(3, 4, e).unwrap();
            let brute = (0u64..16).any(|a| h.edges().iter().all(|&e| (e & a).count_ones() == 1));
            assert_eq!(is_semibipartite(&h).is_some(), brute);
        }
    }

    #[test]
    fn criticality() {
        assert!(is_edge_critical(&complete(4, 2).unwrap()).unwrap());
        assert!(is_edge_critical(&cycle(5).unwrap()).unwrap());
        assert!(!is_edge_critical(&cycle(6).unwrap()).unwrap());
        // two triangles sharing a vertex: no single edge drops χ, a matching does
        let bowtie = RGraph::new(2, 5, [[0, 1], [0, 2], [1, 2], [0, 3], [0, 4], [3, 4]]).unwrap();
        assert!(!is_edge_critical(&bowtie).unwrap());
        assert!(is_matching_critical(&bowtie).unwrap());
        assert!(!is_matching_critical(&RGraph::empty(2, 3).unwrap()).unwrap());
    }
}
