#![allow(dead_code)]

use hyperstab::graph::{full_mask, subsets_of};
use hyperstab::{FamilySpec, RGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(r: usize, n: usize, p: f64, rng: &mut ChaCha8Rng) -> RGraph {
    let edges = subsets_of(full_mask(n), r).into_iter().filter(|_| rng.gen_bool(p)).collect();
    RGraph::from_masks(r, n, edges).unwrap()
}

/// Random fam-free r-graph: slots in random order, each kept if freeness survives,
/// stopping after a random number of insertions.
pub fn random_free(fam: &FamilySpec, n: usize, rng: &mut ChaCha8Rng) -> RGraph {
    let r = fam.r();
    let mut slots = subsets_of(full_mask(n), r);
    slots.shuffle(rng);
    let target = rng.gen_range(0..=slots.len());
    let mut g = RGraph::empty(r, n).unwrap();
    for s in slots.into_iter().take(target) {
        let h = g.with_edge(s);
        if fam.is_free(&h) {
            g = h;
        }
    }
    g
}

pub fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
