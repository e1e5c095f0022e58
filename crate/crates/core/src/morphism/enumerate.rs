//! Isomorph-free generation by canonical edge augmentation.
//!
//! Level `k` holds one representative per isomorphism class with `k` edges.
//! For a predicate inherited by subgraphs every accepted graph with `k + 1`
//! edges extends some accepted graph with `k` edges, so rejected graphs are
//! never extended.

use rayon::prelude::*;
use serde::Serialize;

use super::canon::canonical_form;
use super::FamilySpec;
use crate::error::{Error, Result};
use crate::graph::{edges_cmp, full_mask, subsets_of, RGraph};

#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Upper bound on the number of stored representatives.
    pub max_graphs: usize,
    /// Largest vertex count accepted; `None` uses 9 for graphs and 7 otherwise.
    pub max_vertices: Option<usize>,
    /// Whether the predicate is inherited by subgraphs and may prune the search.
    pub monotone: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_graphs: 2_000_000, max_vertices: None, monotone: true }
    }
}

impl EnumOptions {
    fn vertex_limit(&self, r: usize) -> usize {
        self.max_vertices.unwrap_or(if r <= 2 { 9 } else { 7 })
    }
}

/// Representatives grouped by edge count, each in canonical labelling.
pub fn enumerate_levels<P>(r: usize, n: usize, pred: P, opts: &EnumOptions) -> Result<Vec<Vec<RGraph>>>
where
    P: Fn(&RGraph) -> bool + Sync,
{
    let limit = opts.vertex_limit(r);
    if n > limit {
        return Err(Error::Budget(format!("enumeration of {r}-graphs on {n} > {limit} vertices refused")));
    }
    let empty = RGraph::empty(r, n)?;
    let slots = subsets_of(full_mask(n), r);
    let prune = |g: &RGraph| !opts.monotone || pred(g);
    if !prune(&empty) {
        return Ok(Vec::new());
    }
    let mut levels: Vec<Vec<RGraph>> = vec![vec![empty]];
    let mut total = 1usize;
    loop {
        let last = levels.last().expect("nonempty");
        let mut next: Vec<Vec<u64>> = last
            .par_iter()
            .flat_map_iter(|g| {
                slots.iter().filter(|&&m| !g.has_edge(m)).filter_map(move |&m| {
                    let child = g.with_edge(m);
                    prune(&child).then(|| canonical_form(&child).edges)
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        next.par_sort_unstable_by(|a, b| edges_cmp(a, b));
        next.dedup();
        total += next.len();
        if total > opts.max_graphs {
            return Err(Error::Budget(format!(
                "more than {} representatives for {r}-graphs on {n} vertices",
                opts.max_graphs
            )));
        }
        levels.push(next.into_iter().map(|e| RGraph::from_sorted_unchecked(r, n, e)).collect());
    }
    if !opts.monotone {
        for level in &mut levels {
            level.retain(|g| pred(g));
        }
    }
    Ok(levels)
}

/// All representatives, ordered by edge count and then canonically.
pub fn enumerate_rgraphs<P>(r: usize, n: usize, pred: P, opts: &EnumOptions) -> Result<Vec<RGraph>>
where
    P: Fn(&RGraph) -> bool + Sync,
{
    Ok(enumerate_levels(r, n, pred, opts)?.into_iter().flatten().collect())
}

/// Distinct homomorphic images `φ(F)` up to isomorphism, `F` itself included.
pub fn homomorphic_images(f: &RGraph) -> Vec<RGraph> {
    let n = f.n();
    let mut block = vec![0usize; n];
    fn rec(f: &RGraph, v: usize, blocks: usize, block: &mut Vec<usize>, out: &mut Vec<(usize, Vec<u64>)>) {
        if v == f.n() {
            let mut edges: Vec<u64> = f
                .edges()
                .iter()
                .map(|&e| crate::graph::bits(e).fold(0u64, |m, w| m | (1u64 << block[w])))
                .collect();
            if edges.iter().any(|e| e.count_ones() as usize != f.r()) {
                return;
            }
            crate::graph::sort_edges(&mut edges);
            edges.dedup();
            let g = RGraph::from_sorted_unchecked(f.r(), blocks, edges);
            out.push((blocks, canonical_form(&g).edges));
            return;
        }
        for b in 0..=blocks {
            block[v] = b;
            rec(f, v + 1, blocks.max(b + 1), block, out);
        }
    }
    let mut raw = Vec::new();
    rec(f, 0, 0, &mut block, &mut raw);
    raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then_with(|| edges_cmp(&a.1, &b.1)));
    raw.dedup();
    raw.into_iter().map(|(k, e)| RGraph::from_sorted_unchecked(f.r(), k, e)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceVerdict {
    pub family: String,
    pub n_max: usize,
    /// Free graphs examined, up to isomorphism.
    pub checked: usize,
    /// A free graph admitting a homomorphism from some member, if one exists in range.
    pub counterexample: Option<Vec<Vec<usize>>>,
    pub counterexample_n: Option<usize>,
    /// Whether every homomorphic image of a listed member is itself a member;
    /// `None` when the family is not materialized.
    pub closed_under_hom_images: Option<bool>,
}

impl InvarianceVerdict {
    pub fn invariant_in_range(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that every free graph on at most `n_max` vertices is also hom-free.
pub fn check_blowup_invariance(fam: &FamilySpec, n_max: usize, opts: &EnumOptions) -> Result<InvarianceVerdict> {
    let mut checked = 0;
    let mut counterexample = None;
    let mut counterexample_n = None;
    for n in 1..=n_max {
        let free = enumerate_rgraphs(fam.r(), n, |g| fam.is_free(g), opts)?;
        checked += free.len();
        if let Some(g) = free.par_iter().find_first(|g| !fam.is_hom_free(g)) {
            counterexample = Some(g.edge_lists());
            counterexample_n = Some(n);
            break;
        }
    }
    let closed_under_hom_images = fam.members().map(|members| {
        let forms: Vec<_> = members.iter().map(canonical_form).collect();
        members
            .iter()
            .all(|m| homomorphic_images(m).iter().all(|img| forms.contains(&canonical_form(img))))
    });
    Ok(InvarianceVerdict {
        family: fam.id(),
        n_max,
        checked,
        counterexample,
        counterexample_n,
        closed_under_hom_images,
    })
}
