//! Zykov symmetrization and exact Turán numbers of blowup-invariant families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{binomial, bits, mask_of, RGraph};
use crate::lagrangian::{maximize, LagrangianOptions};
use crate::morphism::{canonical_form, enumerate_levels, EnumOptions, FamilySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymMode {
    Class,
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    ClassMerge,
    Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymStep {
    pub kind: StepKind,
    /// Class whose links are replaced.
    pub from_class: Vec<usize>,
    /// Class whose link is copied.
    pub to_class: Vec<usize>,
    /// For vertex steps, the moved vertex and the copied one.
    pub vertices: Option<(usize, usize)>,
    pub edges_before: usize,
    pub edges_after: usize,
    pub psi_before: u64,
    pub psi_after: u64,
    pub classes_before: usize,
    pub classes_after: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymTrace {
    pub mode: SymMode,
    pub initial: RGraph,
    pub steps: Vec<SymStep>,
    #[serde(rename = "final")]
    pub result: RGraph,
}

/// The chosen pair of classes: `C_1` loses its links to `C_2`.
struct Choice {
    c1: Vec<usize>,
    c2: Vec<usize>,
}

/// Least class pair (by index) without a covering edge, oriented by (d(C), |C|).
fn choose(h: &RGraph) -> Option<Choice> {
    let classes = h.equivalence_classes().classes();
    let adj = h.pair_adjacency();
    // equivalent vertices never share an edge, and coverage between two classes is all or nothing
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let (a, b) = (&classes[i], &classes[j]);
            if adj[a[0]] & (1u64 << b[0]) != 0 {
                continue;
            }
            let key = |c: &Vec<usize>| (h.degree(c[0]), c.len());
            let (c1, c2) = if key(a) <= key(b) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            return Some(Choice { c1, c2 });
        }
    }
    None
}

/// H with the link of every vertex in `movers` replaced by the link of `model`.
fn copy_link(h: &RGraph, movers: u64, model: usize) -> RGraph {
    let mut edges: Vec<u64> = h.edges().iter().copied().filter(|&e| e & movers == 0).collect();
    let link = h.link_masks(model);
    for v in bits(movers) {
        edges.extend(link.iter().map(|&a| a | (1u64 << v)));
    }
    RGraph::from_masks_dedup(h.r(), h.n(), edges)
}

fn guard(h: &RGraph, fam: &FamilySpec) -> Result<()> {
    if !fam.is_free(h) {
        return Err(Error::FreenessViolated(format!(
            "symmetrization produced a graph containing a member of {}; the family is not blowup-invariant: {:?}",
            fam.id(),
            h.edge_lists()
        )));
    }
    Ok(())
}

fn record(kind: StepKind, choice: &Choice, vertices: Option<(usize, usize)>, before: &RGraph, after: &RGraph) -> SymStep {
    SymStep {
        kind,
        from_class: choice.c1.clone(),
        to_class: choice.c2.clone(),
        vertices,
        edges_before: before.edge_count(),
        edges_after: after.edge_count(),
        psi_before: before.psi(),
        psi_after: after.psi(),
        classes_before: before.equivalence_classes().class_count(),
        classes_after: after.equivalence_classes().class_count(),
    }
}

fn class_step(h: &RGraph, fam: &FamilySpec) -> Result<Option<(RGraph, SymStep)>> {
    let Some(choice) = choose(h) else { return Ok(None) };
    let next = copy_link(h, mask_of(&choice.c1), choice.c2[0]);
    guard(&next, fam)?;
    let step = record(StepKind::ClassMerge, &choice, None, h, &next);
    Ok(Some((next, step)))
}

fn vertex_step(h: &RGraph, fam: &FamilySpec) -> Result<Option<(RGraph, SymStep)>> {
    let Some(choice) = choose(h) else { return Ok(None) };
    let (v1, v2) = (choice.c1[0], choice.c2[0]);
    let next = copy_link(h, 1u64 << v1, v2);
    guard(&next, fam)?;
    let step = record(StepKind::Vertex, &choice, Some((v1, v2)), h, &next);
    Ok(Some((next, step)))
}

/// One class-merge step, or `None` when H is symmetrized.
pub fn class_symmetrize_step(h: &RGraph, fam: &FamilySpec) -> Result<Option<RGraph>> {
    Ok(class_step(h, fam)?.map(|(g, _)| g))
}

/// One single-vertex step, or `None` when H is symmetrized.
pub fn vertex_symmetrize_step(h: &RGraph, fam: &FamilySpec) -> Result<Option<RGraph>> {
    Ok(vertex_step(h, fam)?.map(|(g, _)| g))
}

fn check_step(s: &SymStep) -> Result<()> {
    let before = (s.edges_before, s.psi_before);
    let after = (s.edges_after, s.psi_after);
    let ok = match s.kind {
        StepKind::ClassMerge => after >= before && s.classes_after < s.classes_before,
        StepKind::Vertex => after > before,
    };
    if !ok {
        return Err(Error::Invariant(format!("symmetrization step broke monotonicity: {s:?}")));
    }
    Ok(())
}

/// Repeats steps until H is symmetrized, checking every invariant on the way.
pub fn symmetrize(h: &RGraph, fam: &FamilySpec, mode: SymMode) -> Result<SymTrace> {
    if h.r() != fam.r() {
        return Err(Error::UniformityMismatch(fam.r(), h.r()));
    }
    if !fam.is_free(h) {
        return Err(Error::Precondition(format!("input contains a member of {}", fam.id())));
    }
    let mut cur = h.clone();
    let mut steps = Vec::new();
    // (|H|, Ψ) is bounded by (C(n, r), n²), which bounds the number of vertex steps
    let cap = h.n() * h.n() * (binomial(h.n(), h.r()) as usize + 1) + h.n() + 1;
    loop {
        let next = match mode {
            SymMode::Class => class_step(&cur, fam)?,
            SymMode::Vertex => vertex_step(&cur, fam)?,
        };
        let Some((g, step)) = next else { break };
        check_step(&step)?;
        steps.push(step);
        cur = g;
        if steps.len() > cap {
            return Err(Error::Invariant("symmetrization did not terminate".into()));
        }
    }
    if !cur.is_symmetrized() || cur.edge_count() < h.edge_count() {
        return Err(Error::Invariant("final graph is not a symmetrized improvement".into()));
    }
    Ok(SymTrace { mode, initial: h.clone(), steps, result: cur })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExMethod {
    Bruteforce,
    Patterns,
    BothAgree,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExResult {
    pub n: usize,
    pub family: String,
    pub value: usize,
    /// Extremal graphs up to isomorphism, canonically labelled and sorted.
    pub witnesses: Vec<RGraph>,
    pub method: ExMethod,
    /// Some composition search was not exhaustive.
    pub heuristic: bool,
}

fn finish_witnesses(mut w: Vec<RGraph>) -> Vec<RGraph> {
    let mut w: Vec<RGraph> = w.drain(..).map(|g| canonical_form(&g).graph()).collect();
    w.sort();
    w.dedup();
    w
}

fn verify(res: &ExResult, fam: &FamilySpec) -> Result<()> {
    for w in &res.witnesses {
        if w.edge_count() != res.value || w.n() != res.n {
            return Err(Error::Invariant(format!("witness with {} edges reported for value {}", w.edge_count(), res.value)));
        }
        if !fam.is_free(w) {
            return Err(Error::FreenessViolated(format!("witness {:?} contains a member of {}", w.edge_lists(), fam.id())));
        }
    }
    Ok(())
}

/// ex(n, 𝓕) by exhaustive isomorph-free generation.
pub fn ex_bruteforce(n: usize, fam: &FamilySpec, opts: &EnumOptions) -> Result<ExResult> {
    let levels = enumerate_levels(fam.r(), n, |g| fam.is_free(g), opts)?;
    let top = levels.last().ok_or_else(|| Error::Invariant("the empty graph is always free".into()))?;
    let res = ExResult {
        n,
        family: fam.id(),
        value: levels.len() - 1,
        witnesses: finish_witnesses(top.clone()),
        method: ExMethod::Bruteforce,
        heuristic: false,
    };
    verify(&res, fam)?;
    Ok(res)
}

/// L_P(sizes), the edge count of the blowup.
fn blowup_size(p: &RGraph, sizes: &[usize]) -> u128 {
    p.edges().iter().map(|&e| bits(e).map(|v| sizes[v] as u128).product::<u128>()).sum()
}

const COMPOSITION_LIMIT: u128 = 1_000_000;

/// Optimal compositions of `n` into `p.n()` positive parts, and whether the search was exhaustive.
fn best_compositions(p: &RGraph, n: usize) -> (u128, Vec<Vec<usize>>, bool) {
    let k = p.n();
    if binomial(n - 1, k - 1) <= COMPOSITION_LIMIT {
        let mut best = (0u128, Vec::new());
        let mut sizes = vec![1usize; k];
        fn rec(p: &RGraph, i: usize, left: usize, sizes: &mut Vec<usize>, best: &mut (u128, Vec<Vec<usize>>)) {
            let k = sizes.len();
            if i + 1 == k {
                sizes[i] = left;
                let v = blowup_size(p, sizes);
                if v > best.0 || best.1.is_empty() {
                    *best = (v, vec![sizes.clone()]);
                } else if v == best.0 {
                    best.1.push(sizes.clone());
                }
                return;
            }
            for s in 1..=(left - (k - i - 1)) {
                sizes[i] = s;
                rec(p, i + 1, left - s, sizes, best);
            }
        }
        rec(p, 0, n, &mut sizes, &mut best);
        return (best.0, best.1, true);
    }
    // continuous optimum, largest remainders, then ±1 moves until nothing improves
    let x = maximize(p, &LagrangianOptions { supports: Some(false), ..LagrangianOptions::default() })
        .map(|r| r.maximizer.weights().to_vec())
        .unwrap_or_else(|_| vec![1.0 / k as f64; k]);
    let mut sizes = vec![1usize; k];
    let free = n - k;
    let raw: Vec<f64> = x.iter().map(|w| w * free as f64).collect();
    let mut used = 0;
    for (s, r) in sizes.iter_mut().zip(&raw) {
        *s += r.floor() as usize;
        used += r.floor() as usize;
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().take(free - used) {
        sizes[i] += 1;
    }
    let mut value = blowup_size(p, &sizes);
    loop {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || sizes[i] <= 1 {
                    continue;
                }
                sizes[i] -= 1;
                sizes[j] += 1;
                let v = blowup_size(p, &sizes);
                if v > value {
                    value = v;
                    improved = true;
                } else {
                    sizes[i] += 1;
                    sizes[j] -= 1;
                }
            }
        }
        if !improved {
            break;
        }
    }
    (value, vec![sizes], false)
}

/// max |P[V_1, …, V_p]| over fam-free 2-covered patterns P on at most `p_max`
/// vertices and compositions of `n`.
pub fn ex_via_patterns(n: usize, fam: &FamilySpec, p_max: usize, opts: &EnumOptions) -> Result<ExResult> {
    if p_max > n || n == 0 {
        return Err(Error::InvalidParameter(format!("need 1 ≤ p_max ≤ n, got p_max = {p_max}, n = {n}")));
    }
    let r = fam.r();
    let mut patterns = Vec::new();
    for p in 1..=p_max {
        let mut level = crate::morphism::enumerate_rgraphs(r, p, |g| fam.is_free(g), opts)?;
        level.retain(|g| g.is_fully_two_covered());
        patterns.extend(level);
    }
    let found: Vec<(u128, Vec<Vec<usize>>, bool)> = patterns.par_iter().map(|p| best_compositions(p, n)).collect();
    let value = found.iter().map(|f| f.0).max().unwrap_or(0);
    let heuristic = found.iter().any(|f| !f.2);
    let mut witnesses = Vec::new();
    for (p, (v, comps, _)) in patterns.iter().zip(&found) {
        if *v == value {
            for sizes in comps {
                witnesses.push(p.blowup(sizes)?.0);
            }
        }
    }
    let res = ExResult {
        n,
        family: fam.id(),
        value: value as usize,
        witnesses: finish_witnesses(witnesses),
        method: ExMethod::Patterns,
        heuristic,
    };
    verify(&res, fam)?;
    Ok(res)
}

/// Both routes; fails loudly if they disagree.
pub fn ex_both(n: usize, fam: &FamilySpec, p_max: usize, opts: &EnumOptions) -> Result<ExResult> {
    let brute = ex_bruteforce(n, fam, opts)?;
    let pat = ex_via_patterns(n, fam, p_max, opts)?;
    if brute.value != pat.value {
        return Err(Error::Invariant(format!("exhaustive value {} differs from pattern value {}", brute.value, pat.value)));
    }
    Ok(ExResult { method: ExMethod::BothAgree, heuristic: pat.heuristic, ..brute })
}
