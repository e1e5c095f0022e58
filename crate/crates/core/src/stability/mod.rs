//! Target classes, hull membership, deletion distances and stability scans.

mod color;
mod degree;
mod embed;
mod scan;

pub use color::{chromatic_number, is_edge_critical, is_krl_colorable, is_matching_critical, is_semibipartite, rainbow_partition_direct};
pub use degree::{
    check_vertex_extendable, clean_min_degree, extend_by_set, near_turan_check, z_epsilon, z_epsilon_report, ExtendBySetReport,
    ExtendVerdict, NearTuranReport, VertexExtendReport, ZEpsilonReport,
};
pub use embed::{greedy_embed, EmbedHypotheses, EmbedOutcome};
pub use scan::{
    edge_distance, scan_extendability, scan_stability, sigma4_profile, vertex_distance, Distance, ExtendabilityScan, ScanOptions,
    Sigma4Profile, StabilityCounterexample, StabilityKind, StabilityVerdict,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{binomial, mask_of, RGraph};
use crate::morphism::{enumerate_rgraphs, has_homomorphism, EnumOptions};
use crate::rational::{factorial, int, pow_int};

/// An intended class 𝔥 of extremal configurations.
///
/// Blowups may leave parts empty, so each class is closed under induced subgraphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassSpec {
    /// 𝔎^r_ℓ, blowups of K^r_ℓ.
    KrlBlowups { r: usize, l: usize },
    /// 𝔖^r, complete semibipartite r-graphs.
    Semibipartite { r: usize },
    /// 𝔗_r restricted to patterns on at most `p_max` vertices.
    TwoCoveredSystems { r: usize, p_max: usize },
}

impl ClassSpec {
    pub fn krl(r: usize, l: usize) -> Result<Self> {
        if r < 2 || l < r {
            return Err(Error::InvalidParameter(format!("K^r_ℓ blowups need 2 ≤ r ≤ ℓ, got r = {r}, ℓ = {l}")));
        }
        Ok(ClassSpec::KrlBlowups { r, l })
    }

    pub fn semibipartite(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidParameter(format!("semibipartite class needs r ≥ 2, got {r}")));
        }
        Ok(ClassSpec::Semibipartite { r })
    }

    pub fn two_covered(r: usize, p_max: usize) -> Result<Self> {
        if r < 2 || p_max < r {
            return Err(Error::InvalidParameter(format!("2-covered systems need 2 ≤ r ≤ p_max, got r = {r}, p_max = {p_max}")));
        }
        Ok(ClassSpec::TwoCoveredSystems { r, p_max })
    }

    pub fn r(&self) -> usize {
        match *self {
            ClassSpec::KrlBlowups { r, .. } | ClassSpec::Semibipartite { r } | ClassSpec::TwoCoveredSystems { r, .. } => r,
        }
    }

    pub fn id(&self) -> String {
        match *self {
            ClassSpec::KrlBlowups { r: 2, l: 2 } => "bipartite".to_string(),
            ClassSpec::KrlBlowups { r, l } => format!("krl:{r}:{l}"),
            ClassSpec::Semibipartite { r } => format!("semibip:{r}"),
            ClassSpec::TwoCoveredSystems { r, p_max } => format!("tcs:{r}:{p_max}"),
        }
    }

    /// Limiting edge density r!·lim |H|/n^r of the largest members, where known in closed form.
    pub fn density(&self) -> Option<BigRational> {
        match *self {
            ClassSpec::KrlBlowups { r, l } => Some(int(binomial(l, r)) * BigRational::from(factorial(r)) / pow_int(l, r)),
            ClassSpec::Semibipartite { r } => Some(pow_int(r - 1, r - 1) / pow_int(r, r - 1)),
            ClassSpec::TwoCoveredSystems { .. } => None,
        }
    }

    fn check_uniformity(&self, h: &RGraph) -> Result<()> {
        if h.r() != self.r() {
            return Err(Error::UniformityMismatch(self.r(), h.r()));
        }
        Ok(())
    }

    /// H ∈ 𝔥.
    pub fn contains(&self, h: &RGraph) -> Result<bool> {
        self.check_uniformity(h)?;
        if h.is_empty() {
            return Ok(true);
        }
        // every r-graph is the blowup of its quotient by equivalence
        let classes = h.equivalence_classes();
        let reps: Vec<usize> = classes.classes().iter().map(|c| c[0]).collect();
        let quotient = h.induced(&reps)?.graph;
        Ok(match *self {
            ClassSpec::KrlBlowups { r, l } => {
                quotient.n() <= l && quotient.edge_count() as u128 == binomial(quotient.n(), r)
            }
            ClassSpec::Semibipartite { r } => semibipartite_member(h, &classes.classes(), r),
            ClassSpec::TwoCoveredSystems { r, p_max } => {
                quotient.n() <= p_max && quotient.is_fully_two_covered() && quotient.is_design_system(r - 1)?
            }
        })
    }

    /// H ∈ 𝔥⁺, i.e. H is a spanning subgraph of a member.
    pub fn hull_contains(&self, h: &RGraph) -> Result<bool> {
        self.check_uniformity(h)?;
        match *self {
            ClassSpec::KrlBlowups { l, .. } => Ok(is_krl_colorable(h, l)?.is_some()),
            ClassSpec::Semibipartite { .. } => Ok(is_semibipartite(h).is_some()),
            ClassSpec::TwoCoveredSystems { r, p_max } => {
                if h.is_empty() {
                    return Ok(true);
                }
                for p in two_covered_patterns(r, p_max)?.iter() {
                    if has_homomorphism(h, p)?.is_some() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

fn semibipartite_member(h: &RGraph, classes: &[Vec<usize>], r: usize) -> bool {
    // in a nonempty member every vertex has positive degree and A is one class
    if h.degrees().contains(&0) {
        return false;
    }
    classes.iter().any(|a| {
        let side = mask_of(a);
        h.edges().iter().all(|&e| (e & side).count_ones() == 1)
            && h.edge_count() as u128 == a.len() as u128 * binomial(h.n() - a.len(), r - 1)
    })
}

type PatternCache = Mutex<HashMap<(usize, usize), Arc<Vec<RGraph>>>>;

/// Canonical 2-covered (p, r, r−1)-systems with p = 1 or r ≤ p ≤ p_max.
pub fn two_covered_patterns(r: usize, p_max: usize) -> Result<Arc<Vec<RGraph>>> {
    static CACHE: OnceLock<PatternCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("pattern cache").get(&(r, p_max)) {
        return Ok(hit.clone());
    }
    let mut out = vec![RGraph::empty(r, 1)?];
    let opts = EnumOptions { max_vertices: Some(p_max.max(1)), ..EnumOptions::default() };
    for p in r..=p_max {
        let systems = enumerate_rgraphs(r, p, |g| g.is_design_system(r - 1).unwrap_or(false), &opts)?;
        out.extend(systems.into_iter().filter(|g| g.is_fully_two_covered()));
    }
    let out = Arc::new(out);
    cache.lock().expect("pattern cache").insert((r, p_max), out.clone());
    Ok(out)
}

/// H ∈ 𝔥⁺ for the class `c`.
pub fn in_hull(h: &RGraph, c: &ClassSpec) -> Result<bool> {
    c.hull_contains(h)
}
