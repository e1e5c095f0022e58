mod common;

use common::{random_free, random_graph, random_perm, rng};
use hyperstab::constructions::{complete, cycle};
use hyperstab::graph::{bits, full_mask};
use hyperstab::lagrangian::{
    evaluate, gradient, maximize, polynomial, polynomial_exact, LagrangianOptions, SimplexPoint,
};
use hyperstab::morphism::{canonical_form, canonical_form_exhaustive, contains_subgraph, has_homomorphism, is_isomorphic};
use hyperstab::rational::int;
use hyperstab::stability::{
    extend_by_set, greedy_embed, in_hull, is_krl_colorable, rainbow_partition_direct, z_epsilon_report, ClassSpec, EmbedOutcome,
};
use hyperstab::{FamilySpec, RGraph};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn small_graph() -> impl Strategy<Value = RGraph> {
    (2usize..5, 0usize..9, any::<u64>(), 0.05f64..0.9).prop_map(|(r, extra, seed, p)| {
        let n = r + extra.min(8 - r.min(8));
        random_graph(r, n.min(8), p, &mut rng(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn handshake(g in small_graph()) {
        let total: usize = g.degrees().iter().sum();
        prop_assert_eq!(total, g.r() * g.edge_count());
    }

    #[test]
    fn links_rebuild_the_graph(g in small_graph()) {
        for v in 0..g.n() {
            let link = g.link(v).unwrap();
            prop_assert_eq!(link.edge_count(), g.degree(v));
            for e in link.edges() {
                prop_assert!(g.has_edge(e | (1u64 << v)));
            }
        }
    }

    #[test]
    fn psi_bounds(g in small_graph()) {
        let n = g.n() as u64;
        prop_assert!(g.psi() >= n && g.psi() <= n * n);
    }

    #[test]
    fn blowup_identity(g in small_graph(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes: Vec<usize> = (0..g.n()).map(|_| r.gen_range(0..4)).collect();
        if sizes.iter().sum::<usize>() <= 64 {
            let (b, part) = g.blowup(&sizes).unwrap();
            let y: Vec<BigRational> = sizes.iter().map(|&s| int(s as u128)).collect();
            prop_assert_eq!(int(b.edge_count() as u128), polynomial_exact(&g, &y));
            prop_assert_eq!(part.sizes(), sizes);
        }
    }

    #[test]
    fn canonical_form_is_label_invariant(g in small_graph(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = canonical_form(&g);
        for _ in 0..16 {
            let p = random_perm(g.n(), &mut r);
            prop_assert_eq!(&canonical_form(&g.relabel(&p).unwrap()), &c);
        }
    }

    #[test]
    fn fast_and_exhaustive_canon_agree_on_isomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..7);
        let a = random_graph(2, n, 0.5, &mut r);
        let b = if r.gen_bool(0.5) { a.relabel(&random_perm(n, &mut r)).unwrap() } else { random_graph(2, n, 0.5, &mut r) };
        let fast = canonical_form(&a) == canonical_form(&b);
        let slow = canonical_form_exhaustive(&a) == canonical_form_exhaustive(&b);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn containment_implies_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = random_graph(3, r.gen_range(4..8), 0.5, &mut r);
        let f = random_graph(3, r.gen_range(3..6), 0.3, &mut r);
        if contains_subgraph(&h, &f).unwrap().is_some() {
            prop_assert!(has_homomorphism(&f, &h).unwrap().is_some());
        }
    }

    #[test]
    fn maximizer_dominates_random_points(g in small_graph(), seed in any::<u64>()) {
        let res = maximize(&g, &LagrangianOptions::default()).unwrap();
        prop_assert!((evaluate(&g, &res.maximizer).unwrap() - res.value).abs() < 1e-9);
        let mut r = rng(seed);
        for _ in 0..20 {
            let x = SimplexPoint::random(g.n(), &mut r);
            prop_assert!(evaluate(&g, &x).unwrap() <= res.value + 1e-9);
        }
    }

    #[test]
    fn lagrangian_is_monotone(g in small_graph()) {
        if let Some(&e) = g.edges().first() {
            let full = maximize(&g, &LagrangianOptions::default()).unwrap().value;
            let less = maximize(&g.without_edge(e), &LagrangianOptions::default()).unwrap().value;
            prop_assert!(less <= full + 1e-9);
        }
    }

    #[test]
    fn gradient_matches_differences(g in small_graph(), seed in any::<u64>()) {
        let x = SimplexPoint::random(g.n(), &mut rng(seed));
        let grad = gradient(&g, &x).unwrap();
        let h = 1e-6;
        for i in 0..g.n() {
            let mut up = x.weights().to_vec();
            let mut down = up.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (polynomial(&g, &up) - polynomial(&g, &down)) / (2.0 * h);
            prop_assert!((fd - grad[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn colorability_routes_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rr = r.gen_range(2..4);
        let n = r.gen_range(rr..8);
        let g = random_graph(rr, n, 0.4, &mut r);
        for l in rr..=rr + 2 {
            let fast = is_krl_colorable(&g, l).unwrap();
            let slow = rainbow_partition_direct(&g, l);
            prop_assert_eq!(fast.is_some(), slow.is_some());
            if let Some(p) = fast {
                prop_assert!(p.is_rainbow_for(&g));
            }
        }
    }

    #[test]
    fn hull_is_hereditary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let classes = [ClassSpec::krl(3, 3).unwrap(), ClassSpec::semibipartite(3).unwrap(), ClassSpec::two_covered(3, 5).unwrap()];
        let n = r.gen_range(3..7);
        let g = random_graph(3, n, 0.35, &mut r);
        for c in &classes {
            if in_hull(&g, c).unwrap() {
                let drop: Vec<u64> = g.edges().iter().copied().filter(|_| r.gen_bool(0.3)).collect();
                prop_assert!(in_hull(&g.without_edges(&drop), c).unwrap());
                let v = r.gen_range(0..n);
                prop_assert!(in_hull(&g.delete_vertices(&[v]).unwrap().graph, c).unwrap());
            }
        }
    }

    #[test]
    fn extension_succeeds_iff_member(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..9);
        let g = random_graph(2, n, 0.4, &mut r);
        let class = ClassSpec::krl(2, 2).unwrap();
        // S = all vertices always satisfies the precondition
        let mut s: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        if !in_hull(&g.delete_vertices(&s).unwrap().graph, &class).unwrap() {
            s = (0..n).collect();
        }
        let rep = extend_by_set(&g, &s, &class, &int(1), &int(0)).unwrap();
        prop_assert_eq!(rep.success, in_hull(&g, &class).unwrap());
        prop_assert!(in_hull(&g.delete_vertices(&rep.minimal_set).unwrap().graph, &class).unwrap());
    }

    #[test]
    fn greedy_embed_results_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(3..5);
        let sizes: Vec<usize> = (0..m).map(|_| r.gen_range(1..4)).collect();
        let p = hyperstab::constructions::block_partition(&sizes);
        let pattern = random_graph(3, m, 0.7, &mut r);
        let (blow, _) = pattern.blowup(&sizes).unwrap();
        let drop: Vec<u64> = blow.edges().iter().copied().filter(|_| r.gen_bool(0.2)).collect();
        let h = blow.without_edges(&drop);
        let t: Vec<usize> = (0..m - 1).collect();
        let s: Vec<usize> = (0..h.n()).filter(|&v| p.class_of(v) == m - 1).take(1).collect();
        let out = greedy_embed(&h, &p, &pattern, &t, &s, &hyperstab::rational::ratio(1, 100), 500, seed).unwrap();
        if let EmbedOutcome::Found { selection, .. } = out {
            for (k, &u) in selection.iter().enumerate() {
                prop_assert_eq!(p.class_of(u), t[k]);
            }
            let image = |ix: &[usize]| ix.iter().fold(0u64, |a, &k| a | (1u64 << selection[k]));
            for e in hyperstab::graph::subsets_of(full_mask(t.len()), 3) {
                let ix: Vec<usize> = bits(e).collect();
                if pattern.has_edge(ix.iter().fold(0u64, |a, &k| a | (1u64 << t[k]))) {
                    prop_assert!(h.has_edge(image(&ix)));
                }
            }
            for &v in &s {
                for e in hyperstab::graph::subsets_of(full_mask(t.len()), 2) {
                    let ix: Vec<usize> = bits(e).collect();
                    if pattern.has_edge(ix.iter().fold(1u64 << p.class_of(v), |a, &k| a | (1u64 << t[k]))) {
                        prop_assert!(h.has_edge(image(&ix) | (1u64 << v)));
                    }
                }
            }
        }
    }
}

#[test]
fn canonical_form_under_a_thousand_relabelings() {
    let mut r = rng(2024);
    let petersen = RGraph::new(
        2,
        10,
        [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4], [0, 5], [1, 6], [2, 7], [3, 8], [4, 9], [5, 7], [7, 9], [6, 9], [6, 8], [5, 8]],
    )
    .unwrap();
    let fano = RGraph::new(3, 7, [[0, 1, 2], [2, 3, 4], [4, 5, 0], [0, 6, 3], [1, 6, 4], [2, 6, 5], [1, 3, 5]]).unwrap();
    for g in [petersen, fano, cycle(9).unwrap()] {
        let c = canonical_form(&g);
        for _ in 0..1000 {
            let h = g.relabel(&random_perm(g.n(), &mut r)).unwrap();
            assert_eq!(canonical_form(&h), c);
        }
        assert!(is_isomorphic(&g, &g.relabel(&random_perm(g.n(), &mut r)).unwrap()));
    }
}

#[test]
fn z_epsilon_conclusions_on_dense_triangle_free_graphs() {
    let fam = FamilySpec::Single(complete(3, 2).unwrap());
    let pi = hyperstab::rational::ratio(1, 2);
    let mut r = rng(77);
    let mut with_hypothesis = 0;
    for _ in 0..1000 {
        let n = r.gen_range(4..13);
        // dense start: a random bipartite graph, then random triangle-free insertions
        let split = r.gen_range(1..n);
        let mut g = RGraph::empty(2, n).unwrap();
        for u in 0..split {
            for v in split..n {
                if r.gen_bool(0.85) {
                    g = g.with_edge((1u64 << u) | (1u64 << v));
                }
            }
        }
        for _ in 0..n {
            let u = r.gen_range(0..n);
            let v = r.gen_range(0..n);
            if u != v && !g.has_edge((1u64 << u) | (1u64 << v)) {
                let h = g.with_edge((1u64 << u) | (1u64 << v));
                if fam.is_free(&h) {
                    g = h;
                }
            }
        }
        let eps = hyperstab::rational::ratio(r.gen_range(1..200), 1000);
        let rep = z_epsilon_report(&g, &pi, &eps).unwrap();
        with_hypothesis += usize::from(rep.hypothesis);
        assert!(rep.consistent(), "{:?} {:?} eps {eps}", g.edge_lists(), rep);
    }
    assert!(with_hypothesis > 100);
}

#[test]
fn symmetrization_random_triangle_free() {
    use hyperstab::symmetrizer::{symmetrize, SymMode};
    let fam = FamilySpec::Single(complete(3, 2).unwrap());
    let mut r = rng(11);
    for _ in 0..100 {
        let n = r.gen_range(3..9);
        let h = random_free(&fam, n, &mut r);
        for mode in [SymMode::Class, SymMode::Vertex] {
            let t = symmetrize(&h, &fam, mode).unwrap();
            assert!(t.result.is_symmetrized() && fam.is_free(&t.result));
        }
    }
}
