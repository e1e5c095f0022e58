//! Deletion distances to a hull and exhaustive stability scans.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::degree::{check_vertex_extendable, meets_degree_threshold, meets_edge_threshold, z_epsilon, ExtendVerdict};
use super::{two_covered_patterns, ClassSpec};
use crate::error::{Error, Result};
use crate::graph::{bits, full_mask, subsets_of, RGraph};
use crate::morphism::{enumerate_rgraphs, EnumOptions, FamilySpec};
use crate::rational::{int, le_sqrt, pow_int, ratio, to_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Degree,
    Vertex,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distance {
    pub value: usize,
    /// False when `value` is only an upper bound.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub enumeration: EnumOptions,
    /// Largest n for which vertex distances are computed exactly.
    pub vertex_exact_limit: usize,
    /// Search nodes allowed per exact edge-distance computation.
    pub edge_node_budget: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { enumeration: EnumOptions::default(), vertex_exact_limit: 12, edge_node_budget: 20_000_000 }
    }
}

/// Fewest vertices whose removal puts H into the hull.
pub fn vertex_distance(h: &RGraph, class: &ClassSpec, exact_limit: usize) -> Result<Distance> {
    let n = h.n();
    let keep_ok = |removed: u64| class.hull_contains(&h.induced_mask(full_mask(n) & !removed).graph);
    if n <= exact_limit {
        for k in 0..=n {
            for s in subsets_of(full_mask(n), k) {
                if keep_ok(s)? {
                    return Ok(Distance { value: k, exact: true });
                }
            }
        }
        unreachable!("removing every vertex leaves an empty graph");
    }
    // greedy: drop a highest-degree vertex of what remains
    let mut removed = 0u64;
    while !keep_ok(removed)? {
        let rest = h.isolate_vertices_mask(removed);
        let v = (0..n).filter(|v| removed & (1u64 << v) == 0).max_by_key(|&v| (rest.degree(v), std::cmp::Reverse(v))).expect("vertex left");
        removed |= 1u64 << v;
    }
    Ok(Distance { value: removed.count_ones() as usize, exact: false })
}

/// Labelling of V(H) by `k` labels minimizing the edges flagged by `bad`.
struct Labeler<'a> {
    closing: Vec<Vec<u64>>,
    k: usize,
    symmetric: bool,
    bad: &'a (dyn Fn(&[usize], u64) -> bool + Sync),
    budget: u64,
    nodes: u64,
    best: usize,
    best_labels: Vec<usize>,
}

impl Labeler<'_> {
    fn run(h: &RGraph, k: usize, symmetric: bool, bad: &(dyn Fn(&[usize], u64) -> bool + Sync), budget: u64) -> (usize, Vec<usize>, bool) {
        let n = h.n();
        let mut closing = vec![Vec::new(); n];
        for &e in h.edges() {
            closing[63 - e.leading_zeros() as usize].push(e);
        }
        let mut lab = Labeler { closing, k, symmetric, bad, budget, nodes: 0, best: h.edge_count() + 1, best_labels: vec![0; n] };
        let mut labels = vec![0usize; n];
        lab.rec(0, 0, 0, &mut labels);
        (lab.best, lab.best_labels, lab.nodes <= lab.budget)
    }

    fn rec(&mut self, v: usize, cost: usize, used: usize, labels: &mut Vec<usize>) {
        if cost >= self.best || self.nodes > self.budget {
            return;
        }
        self.nodes += 1;
        if v == labels.len() {
            self.best = cost;
            self.best_labels = labels.clone();
            return;
        }
        let top = if self.symmetric { self.k.min(used + 1) } else { self.k };
        for c in 0..top {
            labels[v] = c;
            let extra = self.closing[v].iter().filter(|&&e| (self.bad)(labels, e)).count();
            self.rec(v + 1, cost + extra, used.max(c + 1), labels);
        }
    }
}

fn distinct_labels(labels: &[usize], e: u64) -> Option<u64> {
    let mut seen = 0u64;
    for v in bits(e) {
        let b = 1u64 << labels[v];
        if seen & b != 0 {
            return None;
        }
        seen |= b;
    }
    Some(seen)
}

/// Best labelling for the class together with its defect, and whether the search finished.
fn best_labeling(h: &RGraph, class: &ClassSpec, budget: u64) -> Result<(usize, Vec<usize>, bool)> {
    Ok(match *class {
        ClassSpec::KrlBlowups { l, .. } => Labeler::run(h, l, true, &|lab: &[usize], e| distinct_labels(lab, e).is_none(), budget),
        ClassSpec::Semibipartite { .. } => {
            Labeler::run(h, 2, false, &|lab: &[usize], e| bits(e).filter(|&v| lab[v] == 0).count() != 1, budget)
        }
        ClassSpec::TwoCoveredSystems { r, p_max } => {
            let mut best = (h.edge_count(), vec![0; h.n()], true);
            for p in two_covered_patterns(r, p_max)?.iter() {
                let bad = |lab: &[usize], e: u64| distinct_labels(lab, e).is_none_or(|m| !p.has_edge(m));
                let (d, labels, done) = Labeler::run(h, p.n(), false, &bad, budget);
                best.2 &= done;
                if d < best.0 {
                    best.0 = d;
                    best.1 = labels;
                }
            }
            best
        }
    })
}

/// Fewest edges whose removal puts H into the hull.
///
/// Hull members are exactly the r-graphs with a labelling under which every
/// edge is good, so the distance is a minimum over labellings.
pub fn edge_distance(h: &RGraph, class: &ClassSpec, node_budget: u64) -> Result<Distance> {
    if h.r() != class.r() {
        return Err(Error::UniformityMismatch(class.r(), h.r()));
    }
    let (value, _, exact) = best_labeling(h, class, node_budget)?;
    Ok(Distance { value: value.min(h.edge_count()), exact })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityCounterexample {
    pub graph: RGraph,
    pub min_degree: usize,
    pub distance: Option<Distance>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub free_graphs: usize,
    pub qualifying: usize,
    pub max_distance: Option<usize>,
    pub counterexamples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub family: String,
    pub class: String,
    pub kind: StabilityKind,
    pub n_min: usize,
    pub n_max: usize,
    pub eps: String,
    pub delta: String,
    pub pi_ref: String,
    pub scanned: usize,
    pub qualifying: usize,
    pub rows: Vec<ScanRow>,
    pub counterexamples: Vec<StabilityCounterexample>,
    /// Inputs whose distance bound was exceeded only by an inexact estimate.
    pub unresolved: usize,
    pub label: String,
}

impl StabilityVerdict {
    pub fn clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn range_label(found: usize, n_min: usize, n_max: usize) -> String {
    if found == 0 {
        format!("no counterexample up to n = {n_max}")
    } else {
        format!("{found} counterexample(s) for n in {n_min}..={n_max}")
    }
}

enum Outcome {
    Fine(Option<usize>),
    Counter(StabilityCounterexample),
    Unresolved(Option<usize>),
}

#[allow(clippy::too_many_arguments)]
fn judge(
    g: &RGraph,
    class: &ClassSpec,
    kind: StabilityKind,
    eps: &BigRational,
    delta: &BigRational,
    pi_ref: &BigRational,
    opts: &ScanOptions,
) -> Result<Option<Outcome>> {
    let (r, n) = (g.r(), g.n());
    let qualifies = match kind {
        StabilityKind::Degree => meets_degree_threshold(g.min_degree(), pi_ref, eps, r, n),
        _ => meets_edge_threshold(g.edge_count(), pi_ref, eps, r, n),
    };
    if !qualifies {
        return Ok(None);
    }
    let counter = |d: Option<Distance>| StabilityCounterexample { graph: g.clone(), min_degree: g.min_degree(), distance: d };
    Ok(Some(match kind {
        StabilityKind::Degree => {
            if class.hull_contains(g)? {
                Outcome::Fine(None)
            } else {
                Outcome::Counter(counter(None))
            }
        }
        StabilityKind::Vertex | StabilityKind::Edge => {
            let (d, bound) = if kind == StabilityKind::Vertex {
                (vertex_distance(g, class, opts.vertex_exact_limit)?, delta * int(n as u128))
            } else {
                (edge_distance(g, class, opts.edge_node_budget)?, delta * int(g.edge_count() as u128))
            };
            if int(d.value as u128) <= bound {
                Outcome::Fine(Some(d.value))
            } else if d.exact {
                Outcome::Counter(counter(Some(d)))
            } else {
                Outcome::Unresolved(Some(d.value))
            }
        }
    }))
}

/// Enumerates all fam-free r-graphs for n in `n_min..=n_max` meeting the
/// threshold of `kind` and tests them against the hull.
#[allow(clippy::too_many_arguments)]
pub fn scan_stability(
    fam: &FamilySpec,
    class: &ClassSpec,
    kind: StabilityKind,
    n_min: usize,
    n_max: usize,
    eps: &BigRational,
    delta: &BigRational,
    pi_ref: &BigRational,
    opts: &ScanOptions,
) -> Result<StabilityVerdict> {
    if fam.r() != class.r() {
        return Err(Error::UniformityMismatch(fam.r(), class.r()));
    }
    if n_min > n_max {
        return Err(Error::InvalidParameter(format!("empty range {n_min}..={n_max}")));
    }
    let r = fam.r();
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    let (mut scanned, mut qualifying, mut unresolved) = (0, 0, 0);
    for n in n_min..=n_max {
        let graphs = enumerate_rgraphs(r, n, |g| fam.is_free(g), &opts.enumeration)?;
        let outcomes: Vec<Option<Outcome>> =
            graphs.par_iter().map(|g| judge(g, class, kind, eps, delta, pi_ref, opts)).collect::<Result<_>>()?;
        let mut row = ScanRow { n, free_graphs: graphs.len(), qualifying: 0, max_distance: None, counterexamples: 0 };
        for o in outcomes.into_iter().flatten() {
            row.qualifying += 1;
            let d = match o {
                Outcome::Fine(d) => d,
                Outcome::Unresolved(d) => {
                    unresolved += 1;
                    d
                }
                Outcome::Counter(c) => {
                    // re-verify independently of the scan
                    let g = &c.graph;
                    let still = fam.is_free(g)
                        && match kind {
                            StabilityKind::Degree => {
                                meets_degree_threshold(g.min_degree(), pi_ref, eps, r, n) && !class.hull_contains(g)?
                            }
                            _ => meets_edge_threshold(g.edge_count(), pi_ref, eps, r, n),
                        };
                    if !still {
                        return Err(Error::Invariant("stability counterexample failed re-verification".into()));
                    }
                    row.counterexamples += 1;
                    let d = c.distance.map(|d| d.value);
                    counterexamples.push(c);
                    d
                }
            };
            row.max_distance = match (row.max_distance, d) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
        scanned += row.free_graphs;
        qualifying += row.qualifying;
        rows.push(row);
    }
    counterexamples.sort_by(|a, b| a.graph.cmp(&b.graph));
    Ok(StabilityVerdict {
        family: fam.id(),
        class: class.id(),
        kind,
        n_min,
        n_max,
        eps: eps.to_string(),
        delta: delta.to_string(),
        pi_ref: pi_ref.to_string(),
        scanned,
        qualifying,
        label: range_label(counterexamples.len(), n_min, n_max),
        rows,
        counterexamples,
        unresolved,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendCounterexample {
    pub graph: RGraph,
    pub vertex: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendabilityScan {
    pub family: String,
    pub class: String,
    pub n_min: usize,
    pub n_max: usize,
    pub zeta: String,
    pub pi_ref: String,
    pub graphs: usize,
    pub checks: usize,
    pub vacuous: usize,
    pub witness_ok: usize,
    pub counterexamples: Vec<ExtendCounterexample>,
    pub label: String,
}

impl ExtendabilityScan {
    pub fn clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Runs `check_vertex_extendable` on every vertex of every fam-free r-graph in range.
#[allow(clippy::too_many_arguments)]
pub fn scan_extendability(
    fam: &FamilySpec,
    class: &ClassSpec,
    n_min: usize,
    n_max: usize,
    zeta: &BigRational,
    pi_ref: &BigRational,
    opts: &ScanOptions,
) -> Result<ExtendabilityScan> {
    if fam.r() != class.r() {
        return Err(Error::UniformityMismatch(fam.r(), class.r()));
    }
    let (mut graphs_total, mut checks, mut vacuous, mut witness_ok) = (0, 0, 0, 0);
    let mut counterexamples = Vec::new();
    for n in n_min.max(1)..=n_max {
        let graphs = enumerate_rgraphs(fam.r(), n, |g| fam.is_free(g), &opts.enumeration)?;
        graphs_total += graphs.len();
        let verdicts: Vec<Vec<ExtendVerdict>> = graphs
            .par_iter()
            .map(|g| (0..n).map(|v| check_vertex_extendable(g, v, class, zeta, pi_ref).map(|rep| rep.verdict)).collect())
            .collect::<Result<_>>()?;
        for (g, vs) in graphs.iter().zip(verdicts) {
            for (v, verdict) in vs.into_iter().enumerate() {
                checks += 1;
                match verdict {
                    ExtendVerdict::Vacuous => vacuous += 1,
                    ExtendVerdict::WitnessOk => witness_ok += 1,
                    ExtendVerdict::Counterexample => counterexamples.push(ExtendCounterexample { graph: g.clone(), vertex: v }),
                }
            }
        }
    }
    counterexamples.sort_by(|a, b| a.graph.cmp(&b.graph).then(a.vertex.cmp(&b.vertex)));
    Ok(ExtendabilityScan {
        family: fam.id(),
        class: class.id(),
        n_min,
        n_max,
        zeta: zeta.to_string(),
        pi_ref: pi_ref.to_string(),
        graphs: graphs_total,
        checks,
        vacuous,
        witness_ok,
        label: range_label(counterexamples.len(), n_min, n_max),
        counterexamples,
    })
}

/// Measured quantities of the partition-and-count argument for dense Σ_4-free 4-graphs.
#[derive(Clone, Debug, Serialize)]
pub struct Sigma4Profile {
    pub n: usize,
    pub edges: usize,
    pub eps: String,
    /// |H| > (1/256 − ε)n⁴.
    pub hypothesis: bool,
    pub z: Vec<usize>,
    /// |Z| ≤ ε^{1/2}n.
    pub z_bound: bool,
    /// Classes A, B, C, D of the best 4-partition of H − Z.
    pub parts: Vec<Vec<usize>>,
    /// max ||X| − n/4| / (ε^{1/2}n) over the four classes.
    pub part_deviation_constant: f64,
    /// d(v) ≥ (1/64 − 2ε^{1/2})n³ for all v ∉ Z.
    pub degree_bound: bool,
    /// Edges of H − Z not crossing A, B, C, D.
    pub inner_defect: usize,
    /// Edges with at least two vertices in Z.
    pub two_in_z: usize,
    /// Edges zxyw deleted because their type is small for z, per type ABC, ABD, ACD, BCD.
    pub small_type_edges: [usize; 4],
    /// Vertices of Z with more than one large type.
    pub multi_large: usize,
    /// Edges through one vertex of Z that meet some class twice.
    pub other_z_edges: usize,
    /// Edges deleted by the pipeline; the remainder is 4-partite.
    pub pipeline_deletions: usize,
    pub pipeline_constant: f64,
    /// Exact distance to 4-partite, when the search finished.
    pub exact_distance: Option<usize>,
    pub exact_constant: Option<f64>,
}

/// Runs the cleaning, partition and deletion count on a Σ_4-free 4-graph.
pub fn sigma4_profile(h: &RGraph, eps: &BigRational, node_budget: u64) -> Result<Sigma4Profile> {
    if h.r() != 4 {
        return Err(Error::UniformityMismatch(4, h.r()));
    }
    if !FamilySpec::Sigma(4).is_free(h) {
        return Err(Error::Precondition("input contains a member of Σ_4".into()));
    }
    let n = h.n();
    let pi = ratio(3, 32);
    let z = z_epsilon(h, &pi, eps)?;
    let z_mask = z.iter().fold(0u64, |m, &v| m | (1u64 << v));
    let n_q = int(n as u128);
    let n4 = pow_int(n, 4);
    let hypothesis = int(h.edge_count() as u128) > (ratio(1, 256) - eps) * &n4;
    let z_bound = le_sqrt(&int(z.len() as u128), &n_q, eps);

    let rest = h.induced_mask(full_mask(n) & !z_mask);
    let klass = ClassSpec::KrlBlowups { r: 4, l: 4 };
    let (inner_defect, rest_labels, _) = best_labeling(&rest.graph, &klass, node_budget)?;
    let mut label = vec![usize::MAX; n];
    for (i, &v) in rest.labels.iter().enumerate() {
        label[v] = rest_labels[i];
    }
    let parts: Vec<Vec<usize>> = (0..4).map(|c| (0..n).filter(|&v| label[v] == c).collect()).collect();
    let masks: Vec<u64> = parts.iter().map(|p| p.iter().fold(0u64, |m, &v| m | (1u64 << v))).collect();

    let sqrt_eps = to_f64(eps).sqrt();
    let part_deviation_constant = if sqrt_eps * (n as f64) > 0.0 {
        parts.iter().map(|p| (p.len() as f64 - n as f64 / 4.0).abs()).fold(0.0, f64::max) / (sqrt_eps * n as f64)
    } else {
        0.0
    };
    let degree_bound = (0..n).filter(|v| z_mask & (1u64 << v) == 0).all(|v| {
        let d = int(h.degree(v) as u128);
        let b = ratio(1, 64) * pow_int(n, 3);
        let c = int(2) * pow_int(n, 3);
        crate::rational::ge_minus_sqrt(&d, &b, &c, eps)
    });

    let mut two_in_z = 0;
    let mut other_z_edges = 0;
    // per z: counts per type, types indexed by the missing class
    let mut type_counts = vec![[0usize; 4]; n];
    let mut type_edges: Vec<[Vec<u64>; 4]> = vec![Default::default(); n];
    let mut deleted: Vec<u64> = Vec::new();
    for &e in h.edges() {
        let zs = (e & z_mask).count_ones();
        if zs >= 2 {
            two_in_z += 1;
            deleted.push(e);
        } else if zs == 1 {
            let zv = (e & z_mask).trailing_zeros() as usize;
            let other = e & !z_mask;
            let hit: Vec<usize> = (0..4).filter(|&c| other & masks[c] != 0).collect();
            if hit.len() == 3 && (0..4).all(|c| (other & masks[c]).count_ones() <= 1) {
                let missing = (0..4).find(|c| !hit.contains(c)).expect("one class missing");
                type_counts[zv][missing] += 1;
                type_edges[zv][missing].push(e);
            } else {
                other_z_edges += 1;
                deleted.push(e);
            }
        } else if distinct_labels(&label, e).is_none() {
            deleted.push(e);
        }
    }
    // large: |L(z)[type]| ≥ 4ε^{1/2}n³, i.e. count² ≥ 16εn⁶
    let large = |c: usize| int((c * c) as u128) >= int(16) * eps * pow_int(n, 6);
    let mut small_type_edges = [0usize; 4];
    let mut multi_large = 0;
    for &zv in &z {
        let larges: Vec<usize> = (0..4).filter(|&t| large(type_counts[zv][t])).collect();
        if larges.len() > 1 {
            multi_large += 1;
        }
        // z joins the class its retained type misses
        let keep = larges.iter().copied().max_by_key(|&t| (type_counts[zv][t], std::cmp::Reverse(t)));
        for t in 0..4 {
            if Some(t) == keep {
                continue;
            }
            if !larges.contains(&t) {
                small_type_edges[t] += type_counts[zv][t];
            }
            deleted.extend(type_edges[zv][t].iter().copied());
        }
        label[zv] = keep.unwrap_or(0);
    }
    let kept = h.without_edges(&deleted);
    if kept.edges().iter().any(|&e| distinct_labels(&label, e).is_none()) {
        return Err(Error::Invariant("pipeline left a non-crossing edge".into()));
    }
    let eps_n4 = to_f64(eps) * to_f64(&n4);
    let exact = best_labeling(h, &klass, node_budget)?;
    let exact_distance = exact.2.then_some(exact.0.min(h.edge_count()));
    Ok(Sigma4Profile {
        n,
        edges: h.edge_count(),
        eps: eps.to_string(),
        hypothesis,
        z,
        z_bound,
        parts,
        part_deviation_constant,
        degree_bound,
        inner_defect,
        two_in_z,
        small_type_edges,
        multi_large,
        other_z_edges,
        pipeline_deletions: deleted.len(),
        pipeline_constant: deleted.len() as f64 / eps_n4,
        exact_constant: exact_distance.map(|d| d as f64 / eps_n4),
        exact_distance,
    })
}
