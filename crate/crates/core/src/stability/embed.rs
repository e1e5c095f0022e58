//! Randomized search for a transversal that copies a blown-up pattern.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bits, mask_of, subsets_of, RGraph, VertexPartition};
use crate::rational::{int, pow_int};

#[derive(Clone, Debug, Serialize)]
pub struct EmbedHypotheses {
    /// |V_j| ≥ (|S|+1)|T|η^{1/r}n for all j ∈ T.
    pub part_sizes: bool,
    /// |H[V_J]| ≥ |Ĝ[V_J]| − ηn^r for all r-sets J ⊆ T.
    pub crossing_edges: bool,
    /// |L_H(v)[V_J]| ≥ |L_Ĝ(v)[V_J]| − ηn^{r−1} for v ∈ S and (r−1)-sets J ⊆ T.
    pub links: bool,
}

impl EmbedHypotheses {
    pub fn all(&self) -> bool {
        self.part_sizes && self.crossing_edges && self.links
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum EmbedOutcome {
    /// `selection[k]` is the vertex chosen from class `t[k]`.
    Found { selection: Vec<usize>, trials: usize, hypotheses: EmbedHypotheses },
    /// Nothing found within the budget; `suspicious` when all hypotheses hold.
    NotFound { trials: usize, hypotheses: EmbedHypotheses, suspicious: bool },
}

struct Instance<'a> {
    h: &'a RGraph,
    partition: &'a VertexPartition,
    g: &'a RGraph,
    t: Vec<usize>,
    s: Vec<usize>,
}

impl Instance<'_> {
    /// Edges of G inside T, as index sets into `t`.
    fn inner_edges(&self) -> Vec<Vec<usize>> {
        let r = self.g.r();
        subsets_of(crate::graph::full_mask(self.t.len()), r)
            .into_iter()
            .map(|m| bits(m).collect::<Vec<_>>())
            .filter(|ix| self.g.has_edge(ix.iter().fold(0u64, |acc, &k| acc | (1u64 << self.t[k]))))
            .collect()
    }

    /// (r−1)-sets J ⊆ T with class(v) ∪ J ∈ G, for each v ∈ S.
    fn link_edges(&self) -> Vec<(usize, Vec<Vec<usize>>)> {
        let r = self.g.r();
        self.s
            .iter()
            .map(|&v| {
                let cv = 1u64 << self.partition.class_of(v);
                let sets = subsets_of(crate::graph::full_mask(self.t.len()), r - 1)
                    .into_iter()
                    .map(|m| bits(m).collect::<Vec<_>>())
                    .filter(|ix| self.g.has_edge(ix.iter().fold(cv, |acc, &k| acc | (1u64 << self.t[k]))))
                    .collect();
                (v, sets)
            })
            .collect()
    }

    fn verify(&self, u: &[usize], inner: &[Vec<usize>], links: &[(usize, Vec<Vec<usize>>)]) -> bool {
        let image = |ix: &[usize]| ix.iter().fold(0u64, |acc, &k| acc | (1u64 << u[k]));
        inner.iter().all(|ix| self.h.has_edge(image(ix)))
            && links.iter().all(|(v, sets)| sets.iter().all(|ix| self.h.has_edge(image(ix) | (1u64 << v))))
    }

    fn hypotheses(&self, eta: &BigRational) -> EmbedHypotheses {
        let (r, n) = (self.h.r(), self.h.n());
        let masks = self.partition.class_masks();
        let sizes = self.partition.sizes();
        let factor = int(((self.s.len() + 1) * self.t.len() * n) as u128);
        // |V_j| ≥ c·η^{1/r} ⇔ (|V_j|/c)^r ≥ η
        let part_sizes = self.t.iter().all(|&j| {
            let q = int(sizes[j] as u128) / &factor;
            num_traits::pow(q, r) >= *eta
        });
        let crossing = |mask: u64, classes: &[usize]| -> usize {
            let span = classes.iter().fold(0u64, |acc, &j| acc | masks[j]);
            self.h
                .edges()
                .iter()
                .filter(|&&e| (e & !mask) & !span == 0 && e & mask == mask)
                .filter(|&&e| classes.iter().all(|&j| ((e & !mask) & masks[j]).count_ones() == 1))
                .count()
        };
        let slack_r = eta * pow_int(n, r);
        let crossing_edges = subsets_of(crate::graph::full_mask(self.t.len()), r).into_iter().all(|m| {
            let classes: Vec<usize> = bits(m).map(|k| self.t[k]).collect();
            let full: u128 = if self.g.has_edge(mask_of(&classes)) { classes.iter().map(|&j| sizes[j] as u128).product() } else { 0 };
            int(crossing(0, &classes) as u128) >= int(full) - &slack_r
        });
        let slack = eta * pow_int(n, r - 1);
        let links = self.s.iter().all(|&v| {
            let cv = 1u64 << self.partition.class_of(v);
            subsets_of(crate::graph::full_mask(self.t.len()), r - 1).into_iter().all(|m| {
                let classes: Vec<usize> = bits(m).map(|k| self.t[k]).collect();
                let full: u128 = if self.g.has_edge(mask_of(&classes) | cv) {
                    classes.iter().map(|&j| sizes[j] as u128).product()
                } else {
                    0
                };
                int(crossing(1u64 << v, &classes) as u128) >= int(full) - &slack
            })
        });
        EmbedHypotheses { part_sizes, crossing_edges, links }
    }
}

/// Samples transversals U = {u_j ∈ V_j : j ∈ T} with Ĝ[U] ⊆ H[U] and
/// L_Ĝ(v)[U] ⊆ L_H(v)[U] for all v ∈ S, where Ĝ is the blowup of G on `partition`.
#[allow(clippy::too_many_arguments)]
pub fn greedy_embed(
    h: &RGraph,
    partition: &VertexPartition,
    g: &RGraph,
    t: &[usize],
    s: &[usize],
    eta: &BigRational,
    trials: usize,
    seed: u64,
) -> Result<EmbedOutcome> {
    if g.r() != h.r() {
        return Err(Error::UniformityMismatch(h.r(), g.r()));
    }
    if partition.vertex_count() != h.n() || partition.class_count() != g.n() {
        return Err(Error::Precondition("partition must cover V(H) with one class per vertex of G".into()));
    }
    if !(eta > &BigRational::zero() && eta < &BigRational::one()) {
        return Err(Error::InvalidParameter(format!("η must lie in (0, 1), got {eta}")));
    }
    let t_mask = g.check_set(t)?;
    if t_mask.count_ones() as usize != t.len() {
        return Err(Error::InvalidParameter("T has repeated classes".into()));
    }
    let s_mask = h.check_set(s)?;
    if s_mask.count_ones() as usize != s.len() {
        return Err(Error::InvalidParameter("S has repeated vertices".into()));
    }
    if let Some(&v) = s.iter().find(|&&v| t_mask & (1u64 << partition.class_of(v)) != 0) {
        return Err(Error::InvalidParameter(format!("vertex {v} of S lies in a class of T")));
    }
    let inst = Instance { h, partition, g, t: t.to_vec(), s: s.to_vec() };
    let hypotheses = inst.hypotheses(eta);
    let classes = partition.classes();
    if t.iter().any(|&j| classes[j].is_empty()) {
        let suspicious = hypotheses.all();
        return Ok(EmbedOutcome::NotFound { trials: 0, hypotheses, suspicious });
    }
    let inner = inst.inner_edges();
    let links = inst.link_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0usize; t.len()];
    for trial in 1..=trials {
        for (k, &j) in t.iter().enumerate() {
            u[k] = classes[j][rng.gen_range(0..classes[j].len())];
        }
        if inst.verify(&u, &inner, &links) {
            return Ok(EmbedOutcome::Found { selection: u, trials: trial, hypotheses });
        }
    }
    let suspicious = hypotheses.all();
    Ok(EmbedOutcome::NotFound { trials, hypotheses, suspicious })
}
