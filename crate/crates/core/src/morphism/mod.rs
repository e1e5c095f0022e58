//! Containment, homomorphisms, forbidden families and their detectors.

mod canon;
mod enumerate;
mod search;

use serde::Serialize;

pub use canon::{canonical_form, canonical_form_exhaustive, is_isomorphic, CanonicalForm};
pub use enumerate::{
    check_blowup_invariance, enumerate_levels, enumerate_rgraphs, homomorphic_images, EnumOptions,
    InvarianceVerdict,
};
pub(crate) use search::MapSearch;

use crate::error::{Error, Result};
use crate::graph::{bits, vertices_of, RGraph};

/// A forbidden family of r-graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// An explicit finite list, all of uniformity `r`.
    List { r: usize, members: Vec<RGraph> },
    Single(RGraph),
    /// Generalized triangles Σ_r.
    Sigma(usize),
    /// 𝒯_r; the free graphs are exactly the cancellative ones.
    Cancellative(usize),
    /// Weak expansions 𝒦^F_ℓ, with `F` padded by isolated vertices to `order = ℓ` vertices.
    WeakExpansion { base: RGraph, order: usize },
}

/// How the connecting edges `S_uv` of a weak expansion may be chosen.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionMode {
    /// Any edge through both images serves, coincidences allowed.
    Covering,
    /// The `S_uv` must be pairwise distinct edges.
    Strict,
}

/// A weak expansion of `F` found inside `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionWitness {
    pub embedding: Vec<usize>,
    /// For every pair of `F` not covered by an edge of `F`, the pair and its connecting edge in `H`.
    pub connectors: Vec<((usize, usize), Vec<usize>)>,
}

impl FamilySpec {
    pub fn list(members: Vec<RGraph>) -> Result<Self> {
        let r = members
            .first()
            .map(|g| g.r())
            .ok_or_else(|| Error::InvalidParameter("explicit family needs at least one member".into()))?;
        if let Some(g) = members.iter().find(|g| g.r() != r) {
            return Err(Error::UniformityMismatch(r, g.r()));
        }
        Ok(FamilySpec::List { r, members })
    }

    pub fn weak_expansion(base: RGraph, order: usize) -> Result<Self> {
        if order < base.n() {
            return Err(Error::InvalidParameter(format!(
                "expansion order {order} below the {} vertices of the base graph",
                base.n()
            )));
        }
        let base = base.padded(order)?;
        Ok(FamilySpec::WeakExpansion { base, order })
    }

    pub fn r(&self) -> usize {
        match self {
            FamilySpec::List { r, .. } => *r,
            FamilySpec::Single(g) => g.r(),
            FamilySpec::Sigma(r) | FamilySpec::Cancellative(r) => *r,
            FamilySpec::WeakExpansion { base, .. } => base.r(),
        }
    }

    /// Short deterministic identifier.
    pub fn id(&self) -> String {
        fn graph_id(g: &RGraph) -> String {
            let c = canonical_form(g);
            let edges: Vec<String> = c
                .edges
                .iter()
                .map(|&e| bits(e).map(|v| v.to_string()).collect::<Vec<_>>().join("."))
                .collect();
            format!("r{}n{}[{}]", g.r(), g.n(), edges.join(","))
        }
        match self {
            FamilySpec::List { members, .. } => {
                let ids: Vec<String> = members.iter().map(graph_id).collect();
                format!("list({})", ids.join(";"))
            }
            FamilySpec::Single(g) => format!("single({})", graph_id(g)),
            FamilySpec::Sigma(r) => format!("sigma{r}"),
            FamilySpec::Cancellative(r) => format!("cancellative{r}"),
            FamilySpec::WeakExpansion { base, order } => format!("weakexp{order}({})", graph_id(base)),
        }
    }

    /// Explicit members, where the family is finite and small enough to list.
    pub fn members(&self) -> Option<Vec<RGraph>> {
        match self {
            FamilySpec::List { members, .. } => Some(members.clone()),
            FamilySpec::Single(g) => Some(vec![g.clone()]),
            FamilySpec::Sigma(r) => Some(sigma_members(*r)),
            FamilySpec::Cancellative(r) => Some(cancellative_members(*r)),
            FamilySpec::WeakExpansion { .. } => None,
        }
    }

    fn check_r(&self, h: &RGraph) -> Result<()> {
        if self.r() == h.r() {
            Ok(())
        } else {
            Err(Error::UniformityMismatch(h.r(), self.r()))
        }
    }

    /// No member of the family is a subgraph of `h`.
    pub fn is_free(&self, h: &RGraph) -> bool {
        if self.check_r(h).is_err() {
            return true;
        }
        match self {
            FamilySpec::List { members, .. } => members.iter().all(|f| embed(h, f).is_none()),
            FamilySpec::Single(f) => embed(h, f).is_none(),
            FamilySpec::Sigma(_) => detect_sigma(h).is_none(),
            FamilySpec::Cancellative(_) => detect_cancellative_violation(h).is_none(),
            FamilySpec::WeakExpansion { base, .. } => expansion_search(h, base, ExpansionMode::Covering).is_none(),
        }
    }

    /// No member of the family maps homomorphically into `h`.
    ///
    /// Named families are checked against their materialized members. For weak
    /// expansions a homomorphism from a member is injective on `V(F)` (every pair
    /// of `V(F)` lies in an edge of the member), so it restricts to an embedding
    /// of `F` that sends uncovered pairs to covered ones; this is the detector.
    pub fn is_hom_free(&self, h: &RGraph) -> bool {
        if self.check_r(h).is_err() {
            return true;
        }
        match self {
            FamilySpec::WeakExpansion { base, .. } => expansion_search(h, base, ExpansionMode::Covering).is_none(),
            _ => self
                .members()
                .unwrap_or_default()
                .iter()
                .all(|f| MapSearch::new(f, h, false).run(&mut |_| true).is_none()),
        }
    }
}

fn embed(h: &RGraph, f: &RGraph) -> Option<Vec<usize>> {
    MapSearch::new(f, h, true).run(&mut |_| true)
}

/// An injective map `φ: V(F) → V(H)` with `φ(E) ∈ H` for every edge `E` of `F`.
pub fn contains_subgraph(h: &RGraph, f: &RGraph) -> Result<Option<Vec<usize>>> {
    if h.r() != f.r() {
        return Err(Error::UniformityMismatch(h.r(), f.r()));
    }
    Ok(embed(h, f))
}

/// A map `φ: V(F) → V(H)` with `φ(E) ∈ H` for every edge `E` of `F`.
pub fn has_homomorphism(f: &RGraph, h: &RGraph) -> Result<Option<Vec<usize>>> {
    if h.r() != f.r() {
        return Err(Error::UniformityMismatch(f.r(), h.r()));
    }
    Ok(MapSearch::new(f, h, false).run(&mut |_| true))
}

/// Edge triples `(A, B, C)` as ascending vertex lists.
pub type EdgeTriple = (Vec<usize>, Vec<usize>, Vec<usize>);

fn triple_search(h: &RGraph, sizes: impl Fn(u32) -> bool) -> Option<EdgeTriple> {
    let edges = h.edges();
    for (i, &b) in edges.iter().enumerate() {
        for &c in &edges[i + 1..] {
            if !sizes((b & c).count_ones()) {
                continue;
            }
            let d = b ^ c;
            if let Some(&a) = edges.iter().find(|&&a| a & d == d) {
                return Some((vertices_of(a), vertices_of(b), vertices_of(c)));
            }
        }
    }
    None
}

/// Edges `A, B, C` with `|B ∩ C| = r − 1` and `B △ C ⊆ A`.
pub fn detect_sigma(h: &RGraph) -> Option<EdgeTriple> {
    let r = h.r() as u32;
    triple_search(h, |s| s + 1 == r)
}

/// Edges `A` and `B ≠ C` with `B △ C ⊆ A`; absent exactly when `h` is cancellative.
pub fn detect_cancellative_violation(h: &RGraph) -> Option<EdgeTriple> {
    triple_search(h, |_| true)
}

/// Members of Σ_r up to isomorphism, indexed by `|A ∩ B ∩ C|`.
pub fn sigma_members(r: usize) -> Vec<RGraph> {
    triple_members(r, 1)
}

/// Members of 𝒯_r up to isomorphism.
pub fn cancellative_members(r: usize) -> Vec<RGraph> {
    (1..=r / 2).flat_map(|j| triple_members(r, j)).collect()
}

/// Three-edge graphs with `|B ∩ C| = r − j` and `B △ C ⊆ A`.
fn triple_members(r: usize, j: usize) -> Vec<RGraph> {
    let core = r - j;
    let b_only: Vec<usize> = (core..r).collect();
    let c_only: Vec<usize> = (r..r + j).collect();
    let mut out = Vec::new();
    for k in 0..=core.min(r - 2 * j) {
        let fresh = r - 2 * j - k;
        let n = r + j + fresh;
        let b: Vec<usize> = (0..core).chain(b_only.iter().copied()).collect();
        let c: Vec<usize> = (0..core).chain(c_only.iter().copied()).collect();
        let a: Vec<usize> = b_only
            .iter()
            .chain(&c_only)
            .copied()
            .chain(0..k)
            .chain(r + j..n)
            .collect();
        out.push(RGraph::new(r, n, [a, b, c]).expect("valid triple member"));
    }
    out
}

fn expansion_search(h: &RGraph, f: &RGraph, mode: ExpansionMode) -> Option<ExpansionWitness> {
    if h.r() != f.r() || f.n() > h.n() {
        return None;
    }
    let f_adj = f.pair_adjacency();
    let mut missing = Vec::new();
    for u in 0..f.n() {
        for v in (u + 1)..f.n() {
            if f_adj[u] & (1u64 << v) == 0 {
                missing.push((u, v));
            }
        }
    }
    let mut search = MapSearch::new(f, h, true);
    for &(u, v) in &missing {
        search.require_pair(u, v);
    }
    let mut connectors = Vec::new();
    let embedding = search.run(&mut |phi| {
        let choice = match mode {
            ExpansionMode::Covering => Some(
                missing
                    .iter()
                    .map(|&(u, v)| {
                        let pair = (1u64 << phi[u]) | (1u64 << phi[v]);
                        h.edges_through(pair).next().expect("pair covered by construction")
                    })
                    .collect::<Vec<u64>>(),
            ),
            ExpansionMode::Strict => distinct_connectors(h, phi, &missing),
        };
        match choice {
            Some(c) => {
                connectors = c;
                true
            }
            None => false,
        }
    })?;
    Some(ExpansionWitness {
        embedding,
        connectors: missing.into_iter().zip(connectors.into_iter().map(vertices_of)).collect(),
    })
}

/// Assigns pairwise distinct host edges to the pairs by bipartite matching.
fn distinct_connectors(h: &RGraph, phi: &[usize], pairs: &[(usize, usize)]) -> Option<Vec<u64>> {
    let options: Vec<Vec<u64>> = pairs
        .iter()
        .map(|&(u, v)| h.edges_through((1u64 << phi[u]) | (1u64 << phi[v])).collect())
        .collect();
    let mut owner: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    fn augment(
        i: usize,
        options: &[Vec<u64>],
        owner: &mut std::collections::HashMap<u64, usize>,
        seen: &mut std::collections::HashSet<u64>,
    ) -> bool {
        for &e in &options[i] {
            if !seen.insert(e) {
                continue;
            }
            let prev = owner.get(&e).copied();
            if prev.is_none_or(|p| augment(p, options, owner, seen)) {
                owner.insert(e, i);
                return true;
            }
        }
        false
    }
    for i in 0..pairs.len() {
        let mut seen = std::collections::HashSet::new();
        if !augment(i, &options, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = vec![0u64; pairs.len()];
    for (e, i) in owner {
        out[i] = e;
    }
    Some(out)
}

/// A member of 𝒦^F_{v(F)} inside `h`: an embedding of `F` under which every pair
/// of `V(F)` not covered in `F` is covered in `h`.
pub fn detect_weak_expansion(h: &RGraph, f: &RGraph, mode: ExpansionMode) -> Result<Option<ExpansionWitness>> {
    if h.r() != f.r() {
        return Err(Error::UniformityMismatch(h.r(), f.r()));
    }
    Ok(expansion_search(h, f, mode))
}
