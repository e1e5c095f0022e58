//! Backtracking search for edge-preserving vertex maps.

use std::collections::HashSet;

use crate::graph::{bits, subsets_of, RGraph};

/// Search for maps `φ: V(F) → V(H)` sending every edge of `F` to an edge of `H`.
pub(crate) struct MapSearch<'a> {
    f: &'a RGraph,
    h: &'a RGraph,
    injective: bool,
    /// `pairs[u]`: vertices `w` of `F` for which `φ(u)φ(w)` must be covered in `H`.
    pairs: Vec<u64>,
}

struct Plan {
    order: Vec<usize>,
    /// Edges of F completed when `order[k]` is placed.
    closing: Vec<Vec<u64>>,
    /// Proper nonempty parts of edges through `order[k]`, restricted to the placed prefix.
    partial: Vec<Vec<u64>>,
    /// Placed neighbours of `order[k]` whose images must be adjacent to the image of `order[k]`.
    linked: Vec<u64>,
}

struct State<'a, 'b> {
    plan: &'b Plan,
    h: &'a RGraph,
    host_parts: HashSet<u64>,
    host_adj: Vec<u64>,
    host_deg: Vec<usize>,
    host_cov: Vec<u32>,
    f_deg: Vec<usize>,
    f_cov: Vec<u32>,
    injective: bool,
    phi: Vec<usize>,
    used: u64,
}

impl<'a> MapSearch<'a> {
    pub(crate) fn new(f: &'a RGraph, h: &'a RGraph, injective: bool) -> Self {
        MapSearch { f, h, injective, pairs: vec![0; f.n()] }
    }

    /// Require `φ(u)φ(v)` to be covered by an edge of `H`.
    pub(crate) fn require_pair(&mut self, u: usize, v: usize) {
        self.pairs[u] |= 1u64 << v;
        self.pairs[v] |= 1u64 << u;
    }

    fn plan(&self) -> Plan {
        let nf = self.f.n();
        let f_adj = self.f.pair_adjacency();
        let adj: Vec<u64> = (0..nf).map(|v| f_adj[v] | self.pairs[v]).collect();
        let deg = self.f.degrees();
        let mut placed = 0u64;
        let mut order = Vec::with_capacity(nf);
        for _ in 0..nf {
            let best = (0..nf)
                .filter(|&v| placed & (1u64 << v) == 0)
                .max_by_key(|&v| {
                    ((adj[v] & placed).count_ones(), deg[v], adj[v].count_ones(), std::cmp::Reverse(v))
                })
                .expect("unplaced vertex");
            order.push(best);
            placed |= 1u64 << best;
        }
        let mut pos = vec![0usize; nf];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut closing = vec![Vec::new(); nf];
        let mut partial = vec![Vec::new(); nf];
        let mut linked = vec![0u64; nf];
        let mut prefix = 0u64;
        for (k, &u) in order.iter().enumerate() {
            prefix |= 1u64 << u;
            linked[k] = adj[u] & prefix;
            for &e in self.f.edges() {
                if e & (1u64 << u) == 0 {
                    continue;
                }
                let last = bits(e).map(|v| pos[v]).max().unwrap_or(0);
                if last == k {
                    closing[k].push(e);
                } else {
                    let part = e & prefix;
                    if part.count_ones() >= 2 {
                        partial[k].push(part);
                    }
                }
            }
            partial[k].sort_unstable();
            partial[k].dedup();
        }
        Plan { order, closing, partial, linked }
    }

    /// Runs the search; `accept` sees each complete map and returns `true` to stop.
    pub(crate) fn run(&self, accept: &mut dyn FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
        let (nf, nh) = (self.f.n(), self.h.n());
        if self.f.r() != self.h.r() || (self.injective && nf > nh) {
            return None;
        }
        if nf == 0 {
            return accept(&[]).then(Vec::new);
        }
        if self.f.edge_count() > 0 && self.h.edge_count() == 0 {
            return None;
        }
        let plan = self.plan();
        let mut host_parts = HashSet::new();
        let r = self.h.r();
        for &e in self.h.edges() {
            for k in 2..r {
                host_parts.extend(subsets_of(e, k));
            }
        }
        let f_adj = self.f.pair_adjacency();
        let mut st = State {
            plan: &plan,
            h: self.h,
            host_parts,
            host_adj: self.h.pair_adjacency(),
            host_deg: self.h.degrees(),
            host_cov: Vec::new(),
            f_deg: self.f.degrees(),
            f_cov: (0..nf).map(|v| (f_adj[v] | self.pairs[v]).count_ones()).collect(),
            injective: self.injective,
            phi: vec![usize::MAX; nf],
            used: 0,
        };
        st.host_cov = st.host_adj.iter().map(|a| a.count_ones()).collect();
        let mut found = None;
        st.descend(0, accept, &mut found);
        found
    }
}

impl State<'_, '_> {
    fn image(&self, mask: u64) -> u64 {
        bits(mask).fold(0u64, |m, v| m | (1u64 << self.phi[v]))
    }

    fn descend(&mut self, k: usize, accept: &mut dyn FnMut(&[usize]) -> bool, found: &mut Option<Vec<usize>>) -> bool {
        let plan = self.plan;
        if k == plan.order.len() {
            if accept(&self.phi) {
                *found = Some(self.phi.clone());
                return true;
            }
            return false;
        }
        let u = plan.order[k];
        let nh = self.h.n();
        let mut cands = crate::graph::full_mask(nh);
        for w in bits(plan.linked[k] & !(1u64 << u)) {
            cands &= self.host_adj[self.phi[w]];
        }
        if self.injective {
            cands &= !self.used;
        }
        for x in bits(cands) {
            if self.injective {
                if self.host_deg[x] < self.f_deg[u] || self.host_cov[x] < self.f_cov[u] {
                    continue;
                }
            } else if self.f_deg[u] > 0 && self.host_deg[x] == 0 {
                continue;
            }
            self.phi[u] = x;
            let ok = plan.closing[k].iter().all(|&e| {
                let img = self.image(e);
                img.count_ones() == e.count_ones() && self.h.has_edge(img)
            }) && plan.partial[k].iter().all(|&p| {
                let img = self.image(p);
                img.count_ones() == p.count_ones() && self.host_parts.contains(&img)
            });
            if ok {
                self.used |= 1u64 << x;
                let stop = self.descend(k + 1, accept, found);
                self.used &= !(1u64 << x);
                if stop {
                    self.phi[u] = usize::MAX;
                    return true;
                }
            }
            self.phi[u] = usize::MAX;
        }
        false
    }
}
