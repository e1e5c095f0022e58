//! Minimum-degree cleaning, vertex extendability and the near-Turán structure check.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::ClassSpec;
use crate::error::{Error, Result};
use crate::graph::{binomial, full_mask, vertices_of, RGraph, Subgraph, VertexPartition};
use crate::rational::{factorial, int, le_minus_sqrt, le_sqrt, pow_int};

fn check_open_unit(name: &str, x: &BigRational) -> Result<()> {
    if !(x > &BigRational::zero() && x < &BigRational::one()) {
        return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

fn check_density(pi: &BigRational) -> Result<()> {
    if pi < &BigRational::zero() || pi >= &BigRational::one() {
        return Err(Error::InvalidParameter(format!("density must lie in [0, 1), got {pi}")));
    }
    Ok(())
}

/// π/(r−1)!·n^{r−1}.
fn degree_scale(pi: &BigRational, r: usize, n: usize) -> BigRational {
    pi / BigRational::from(factorial(r - 1)) * pow_int(n, r - 1)
}

/// `d ≥ (π/(r−1)! − ζ)n^{r−1}`.
pub(crate) fn meets_degree_threshold(d: usize, pi: &BigRational, zeta: &BigRational, r: usize, n: usize) -> bool {
    int(d as u128) >= degree_scale(pi, r, n) - zeta * pow_int(n, r - 1)
}

/// `m ≥ (π/r! − ε)n^r`.
pub(crate) fn meets_edge_threshold(m: usize, pi: &BigRational, eps: &BigRational, r: usize, n: usize) -> bool {
    int(m as u128) >= pi / BigRational::from(factorial(r)) * pow_int(n, r) - eps * pow_int(n, r)
}

/// Z_ε(H): vertices of degree at most (π/(r−1)! − 2ε^{1/2})n^{r−1}.
pub fn z_epsilon(h: &RGraph, pi: &BigRational, eps: &BigRational) -> Result<Vec<usize>> {
    check_density(pi)?;
    check_open_unit("ε", eps)?;
    let (r, n) = (h.r(), h.n());
    let b = degree_scale(pi, r, n);
    let c = int(2) * pow_int(n, r - 1);
    Ok(h.degrees().iter().enumerate().filter(|&(_, &d)| le_minus_sqrt(&int(d as u128), &b, &c, eps)).map(|(v, _)| v).collect())
}

/// H − Z_ε(H).
pub fn clean_min_degree(h: &RGraph, pi: &BigRational, eps: &BigRational) -> Result<Subgraph> {
    let z = z_epsilon(h, pi, eps)?;
    h.delete_vertices(&z)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZEpsilonReport {
    pub z: Vec<usize>,
    /// |H| ≥ (π/r! − ε)n^r.
    pub hypothesis: bool,
    /// |Z| ≤ ε^{1/2}n.
    pub size_bound: bool,
    pub cleaned_vertices: usize,
    pub cleaned_min_degree: Option<usize>,
    /// δ(H − Z) > (π/(r−1)! − 3ε^{1/2})n^{r−1}, vacuous when nothing is left.
    pub min_degree_bound: bool,
}

impl ZEpsilonReport {
    /// Conclusions hold, or the hypothesis does not.
    pub fn consistent(&self) -> bool {
        !self.hypothesis || (self.size_bound && self.min_degree_bound)
    }
}

pub fn z_epsilon_report(h: &RGraph, pi: &BigRational, eps: &BigRational) -> Result<ZEpsilonReport> {
    let z = z_epsilon(h, pi, eps)?;
    let (r, n) = (h.r(), h.n());
    let cleaned = h.delete_vertices(&z)?.graph;
    let cleaned_min_degree = (cleaned.n() > 0).then(|| cleaned.min_degree());
    let b = degree_scale(pi, r, n);
    let c = int(3) * pow_int(n, r - 1);
    Ok(ZEpsilonReport {
        hypothesis: meets_edge_threshold(h.edge_count(), pi, eps, r, n),
        size_bound: le_sqrt(&int(z.len() as u128), &int(n as u128), eps),
        cleaned_vertices: cleaned.n(),
        min_degree_bound: cleaned_min_degree.is_none_or(|d| !le_minus_sqrt(&int(d as u128), &b, &c, eps)),
        cleaned_min_degree,
        z,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtendVerdict {
    Vacuous,
    WitnessOk,
    Counterexample,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexExtendReport {
    pub vertex: usize,
    /// δ(H) ≥ (π_ref/(r−1)! − ζ)n^{r−1}.
    pub degree_condition: bool,
    pub hull_without_vertex: bool,
    pub hull: bool,
    pub verdict: ExtendVerdict,
}

pub fn check_vertex_extendable(
    h: &RGraph,
    v: usize,
    class: &ClassSpec,
    zeta: &BigRational,
    pi_ref: &BigRational,
) -> Result<VertexExtendReport> {
    h.check_vertex(v)?;
    let degree_condition = meets_degree_threshold(h.min_degree(), pi_ref, zeta, h.r(), h.n());
    let hull_without_vertex = class.hull_contains(&h.delete_vertices(&[v])?.graph)?;
    let hull = class.hull_contains(h)?;
    let verdict = match (degree_condition && hull_without_vertex, hull) {
        (false, _) => ExtendVerdict::Vacuous,
        (true, true) => ExtendVerdict::WitnessOk,
        (true, false) => ExtendVerdict::Counterexample,
    };
    Ok(VertexExtendReport { vertex: v, degree_condition, hull_without_vertex, hull, verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendBySetReport {
    /// |S| ≤ εn.
    pub size_condition: bool,
    /// δ(H) ≥ (π_ref/(r−1)! − ε)n^{r−1}.
    pub degree_condition: bool,
    /// Minimal S′ ⊆ S with H − S′ in the hull.
    pub minimal_set: Vec<usize>,
    /// S′ = ∅, i.e. H itself lies in the hull.
    pub success: bool,
    /// Vertices of S that could not be put back, in the order tried.
    pub failed_reinsertions: Vec<usize>,
}

/// Peels vertices of `s` back into H while hull membership survives.
///
/// Greedy peeling already yields a minimal set: the hull is hereditary, so a
/// vertex that cannot return early cannot return later either.
pub fn extend_by_set(h: &RGraph, s: &[usize], class: &ClassSpec, eps: &BigRational, pi_ref: &BigRational) -> Result<ExtendBySetReport> {
    let mut removed = h.check_set(s)?;
    if !class.hull_contains(&h.induced_mask(full_mask(h.n()) & !removed).graph)? {
        return Err(Error::Precondition("H − S is not in the hull".into()));
    }
    let mut failed = Vec::new();
    for v in vertices_of(removed) {
        let trial = removed & !(1u64 << v);
        if class.hull_contains(&h.induced_mask(full_mask(h.n()) & !trial).graph)? {
            removed = trial;
        } else {
            failed.push(v);
        }
    }
    let n = h.n();
    Ok(ExtendBySetReport {
        size_condition: int(s.len() as u128) <= eps * int(n as u128),
        degree_condition: meets_degree_threshold(h.min_degree(), pi_ref, eps, h.r(), n),
        minimal_set: vertices_of(removed),
        success: removed == 0,
        failed_reinsertions: failed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NearTuranReport {
    pub m: usize,
    pub c1: f64,
    pub c2: f64,
    /// |H| ≥ (C(m,r)/m^r − ζ)n^r.
    pub edge_hypothesis: bool,
    /// δ(H) ≥ (C(m−1,r−1)/m^{r−1} − ζ)n^{r−1}.
    pub degree_hypothesis: bool,
    pub part_sizes: Vec<usize>,
    /// max_i ||V_i| − n/m|.
    pub max_part_deviation: f64,
    /// max over v ∈ V_i, j ≠ i of |V_j ∖ N(v)|.
    pub max_cross_deficiency: usize,
    /// max over v of |L_K̂(v) ∖ L_H(v)|.
    pub max_link_deficiency: u128,
    /// ||V_i| − n/m| ≤ C_1ζ^{1/2}n for all i.
    pub part_sizes_ok: bool,
    /// cross deficiency ≤ 2C_1ζ^{1/2}n.
    pub cross_ok: bool,
    /// link deficiency ≤ C_2ζ^{1/2}n^{r−1}.
    pub link_ok: bool,
}

impl NearTuranReport {
    /// Names of conclusions that fail although their hypothesis holds.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.edge_hypothesis && !self.part_sizes_ok {
            out.push("part-sizes");
        }
        if self.degree_hypothesis && !self.cross_ok {
            out.push("cross-neighbourhoods");
        }
        if self.degree_hypothesis && !self.link_ok {
            out.push("links");
        }
        out
    }
}

/// Evaluates the structure of an almost extremal K^r_m-colorable r-graph.
pub fn near_turan_check(h: &RGraph, partition: &VertexPartition, m: usize, zeta: &BigRational) -> Result<NearTuranReport> {
    let (r, n) = (h.r(), h.n());
    if m < r || partition.class_count() != m || partition.vertex_count() != n || !partition.is_rainbow_for(h) {
        return Err(Error::Precondition(format!("partition is not a K^{r}_{m}-coloring of H")));
    }
    if zeta <= &BigRational::zero() {
        return Err(Error::InvalidParameter(format!("ζ must be positive, got {zeta}")));
    }
    let c1_sq = pow_int(m, r - 1) * int((m - 1) as u128) / int(binomial(m, r));
    let c2_factor = int(r as u128) * int(binomial(m - 1, r - 1)) / pow_int(m, r - 2);
    let c2_sq = &c2_factor * &c2_factor * &c1_sq;
    let n_q = int(n as u128);

    let edge_hypothesis = int(h.edge_count() as u128) >= (int(binomial(m, r)) / pow_int(m, r) - zeta) * pow_int(n, r);
    let degree_hypothesis =
        int(h.min_degree() as u128) >= (int(binomial(m - 1, r - 1)) / pow_int(m, r - 1) - zeta) * pow_int(n, r - 1);

    let sizes = partition.sizes();
    let mut max_dev = BigRational::zero();
    for &s in &sizes {
        let d = int(s as u128) - &n_q / int(m as u128);
        let d = if d < BigRational::zero() { -d } else { d };
        if d > max_dev {
            max_dev = d;
        }
    }
    let part_sizes_ok = &max_dev * &max_dev <= &c1_sq * zeta * &n_q * &n_q;

    let masks = partition.class_masks();
    let adj = h.pair_adjacency();
    let mut max_cross = 0usize;
    let mut max_link = 0u128;
    for v in 0..n {
        let i = partition.class_of(v);
        for (j, &mj) in masks.iter().enumerate() {
            if j != i {
                max_cross = max_cross.max((mj & !adj[v]).count_ones() as usize);
            }
        }
        let others: Vec<usize> = (0..m).filter(|&j| j != i).map(|j| sizes[j]).collect();
        let full = elementary_symmetric_int(&others, r - 1);
        max_link = max_link.max(full - h.degree(v) as u128);
    }
    let cross_q = int(max_cross as u128);
    let link_q = int(max_link);
    let cross_ok = &cross_q * &cross_q <= int(4) * &c1_sq * zeta * &n_q * &n_q;
    let link_ok = &link_q * &link_q <= &c2_sq * zeta * pow_int(n, 2 * (r - 1));
    Ok(NearTuranReport {
        m,
        c1: crate::rational::to_f64(&c1_sq).sqrt(),
        c2: crate::rational::to_f64(&c2_sq).sqrt(),
        edge_hypothesis,
        degree_hypothesis,
        part_sizes: sizes,
        max_part_deviation: crate::rational::to_f64(&max_dev),
        max_cross_deficiency: max_cross,
        max_link_deficiency: max_link,
        part_sizes_ok,
        cross_ok,
        link_ok,
    })
}

fn elementary_symmetric_int(x: &[usize], k: usize) -> u128 {
    let mut e = vec![0u128; k + 1];
    e[0] = 1;
    for &xi in x {
        for j in (1..=k).rev() {
            e[j] += e[j - 1] * xi as u128;
        }
    }
    e[k]
}
