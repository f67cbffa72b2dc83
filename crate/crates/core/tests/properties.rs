use std::collections::BTreeMap;

use num_bigint::BigUint;
use preftriad::analysis::census;
use preftriad::count::{class_count, factorial, orbit_case_counts};
use preftriad::perm::{kendall_tau_distance, AlternativeAlphabet, Permutation};
use preftriad::triad::{canonicalize, classify3, PreferenceTriad, NODE_PERMUTATIONS};
use preftriad::Graph;
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|w| Permutation::new(w).unwrap())
}

fn perms(n: usize, k: usize) -> impl Strategy<Value = Vec<Permutation>> {
    prop::collection::vec(perm(n), k)
}

fn sized_perms(k: usize) -> impl Strategy<Value = Vec<Permutation>> {
    (2usize..=7).prop_flat_map(move |n| perms(n, k))
}

fn triad(n: usize) -> impl Strategy<Value = PreferenceTriad> {
    perms(n, 3)
        .prop_map(|p| PreferenceTriad::new(p[0].clone(), p[1].clone(), p[2].clone()).unwrap())
}

fn edge_list(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (3..max_nodes).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..n * 4)))
}

fn smallest_power_to_identity(p: &Permutation) -> u64 {
    let mut q = p.clone();
    let mut k = 1;
    while !q.is_identity() {
        q = p.compose(&q).unwrap();
        k += 1;
    }
    k
}

proptest! {
    #[test]
    fn composition_is_associative(p in sized_perms(3)) {
        let left = p[0].compose(&p[1]).unwrap().compose(&p[2]).unwrap();
        let right = p[0].compose(&p[1].compose(&p[2]).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_and_inverse(p in sized_perms(1)) {
        let p = &p[0];
        let id = Permutation::identity(p.len()).unwrap();
        prop_assert_eq!(&p.compose(&id).unwrap(), p);
        prop_assert_eq!(&id.compose(p).unwrap(), p);
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(p).unwrap().is_identity());
    }

    #[test]
    fn element_order_divides_group_order(p in (2usize..=5).prop_flat_map(perm)) {
        let k = smallest_power_to_identity(&p);
        prop_assert_eq!(p.order(), BigUint::from(k));
        prop_assert_eq!(factorial(p.len()) % k, BigUint::from(0u32));
    }

    #[test]
    fn lex_index_round_trips(p in sized_perms(1)) {
        let p = &p[0];
        prop_assert_eq!(&Permutation::from_lex_index(p.len(), p.lex_index()).unwrap(), p);
    }

    #[test]
    fn kendall_tau_is_a_metric(p in sized_perms(3)) {
        let d = |a: &Permutation, b: &Permutation| kendall_tau_distance(a, b).unwrap();
        prop_assert_eq!(d(&p[0], &p[1]), d(&p[1], &p[0]));
        prop_assert_eq!(d(&p[0], &p[1]) == 0, p[0] == p[1]);
        prop_assert!(d(&p[0], &p[2]) <= d(&p[0], &p[1]) + d(&p[1], &p[2]));
        let n = p[0].len() as u64;
        prop_assert!(d(&p[0], &p[1]) <= n * (n - 1) / 2);
    }

    #[test]
    fn restriction_keeps_relative_order(p in (4usize..=7).prop_flat_map(perm), mask in any::<u8>()) {
        let keep: Vec<usize> = (0..p.len()).filter(|&i| mask >> i & 1 == 1).collect();
        prop_assume!(keep.len() >= 2);
        let r = p.restrict(&keep).unwrap();
        let expected: Vec<usize> = p
            .word()
            .iter()
            .filter_map(|x| keep.iter().position(|k| k == x))
            .collect();
        prop_assert_eq!(r.word(), &expected[..]);
    }

    #[test]
    fn canonical_form_is_orbit_invariant(
        (t, relabel) in (3usize..=5).prop_flat_map(|n| (triad(n), perm(n))),
        node in 0usize..6,
    ) {
        let u = t.transform(NODE_PERMUTATIONS[node], &relabel).unwrap();
        prop_assert_eq!(canonicalize(&t), canonicalize(&u));
    }

    #[test]
    fn canonical_form_is_idempotent_and_in_orbit(t in (2usize..=4).prop_flat_map(triad)) {
        let c = canonicalize(&t);
        prop_assert_eq!(canonicalize(c.triad()), c.clone());
        prop_assert!(c.triad().orderings()[0].is_identity());
        prop_assert!(t.orbit().unwrap().contains(c.triad()));
    }

    #[test]
    fn three_alternative_classes_match_canonical_forms(a in triad(3), b in triad(3)) {
        prop_assert_eq!(classify3(&a).unwrap() == classify3(&b).unwrap(), canonicalize(&a) == canonicalize(&b));
    }

    #[test]
    fn triangles_match_brute_force((n, edges) in edge_list(25)) {
        let (g, _) = Graph::from_edges_with_nodes(n, &edges);
        let adj = |u: usize, v: usize| edges.iter().any(|&(a, b)| a != b && ((a, b) == (u, v) || (a, b) == (v, u)));
        let mut brute = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if adj(a, b) && adj(b, c) && adj(a, c) {
                        brute.push((a, b, c));
                    }
                }
            }
        }
        let mut fast: Vec<_> = g.triangles().collect();
        fast.sort_unstable();
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn rewiring_preserves_degrees((n, edges) in edge_list(40), seed in any::<u64>()) {
        let (g, _) = Graph::from_edges_with_nodes(n, &edges);
        if g.edge_count() < 2 {
            let too_few = matches!(g.rewire(1, seed), Err(preftriad::graph::GraphError::TooFewEdges(_)));
            prop_assert!(too_few);
            return Ok(());
        }
        let out = match g.rewire(g.edge_count(), seed) {
            Ok((out, _)) => out,
            Err(preftriad::graph::GraphError::Saturated { partial }) => partial.0,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(out.degree_sequence(), g.degree_sequence());
        prop_assert_eq!(out.edge_count(), g.edge_count());
        prop_assert!((0..n).all(|u| !out.has_edge(u, u)));
    }

    #[test]
    fn census_ignores_node_and_alternative_names(
        (n, edges) in edge_list(30),
        seed in any::<u64>(),
        relabel in perm(3),
        shuffle in Just((0..30).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let (g, _) = Graph::from_edges_with_nodes(n, &edges);
        let assignment = preftriad::dataset::uniform_assignment(0..n, seed);
        let base = census(&g, &assignment).unwrap();

        let relabeled: BTreeMap<usize, Permutation> = assignment
            .iter()
            .map(|(&k, p)| (k, relabel.compose(p).unwrap()))
            .collect();
        prop_assert_eq!(census(&g, &relabeled).unwrap(), base.clone());

        let names: Vec<usize> = shuffle.into_iter().filter(|&x| x < n).collect();
        let moved_edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (names[u], names[v])).collect();
        let (moved, _) = Graph::from_edges_with_nodes(n, &moved_edges);
        let moved_assignment: BTreeMap<usize, Permutation> =
            assignment.iter().map(|(&k, p)| (names[k], p.clone())).collect();
        prop_assert_eq!(census(&moved, &moved_assignment).unwrap(), base);
    }
}

#[test]
fn every_ordering_of_five_round_trips_through_text() {
    let alphabet = AlternativeAlphabet::default_for(5);
    let named =
        AlternativeAlphabet::new(["WhatsApp", "Facebook", "Hangouts", "SMS", "Skype"]).unwrap();
    let mut seen = 0;
    for p in Permutation::all(5).unwrap() {
        assert_eq!(alphabet.parse(&alphabet.format(&p)).unwrap(), p);
        assert_eq!(named.parse(&named.format(&p)).unwrap(), p);
        seen += 1;
    }
    assert_eq!(seen, 120);
}

#[test]
fn restriction_commutes_with_relabelings_fixing_the_kept_set() {
    let all: Vec<Permutation> = Permutation::all(5).unwrap().collect();
    for mask in 0u32..32 {
        let keep: Vec<usize> = (0..5).filter(|&i| mask >> i & 1 == 1).collect();
        if keep.len() != 3 {
            continue;
        }
        let fixing: Vec<&Permutation> = all
            .iter()
            .filter(|r| keep.iter().all(|&k| r.word()[k] == k))
            .collect();
        assert_eq!(fixing.len(), 2);
        for p in &all {
            for r in &fixing {
                let moved = r.compose(p).unwrap();
                assert_eq!(moved.restrict(&keep).unwrap(), p.restrict(&keep).unwrap());
            }
        }
    }
}

#[test]
fn orbit_cases_partition_the_fixed_first_ordering_triads() {
    for n in 2..=10 {
        let c = orbit_case_counts(n).unwrap();
        let f = factorial(n);
        assert_eq!(c.total(), class_count(n).unwrap(), "n = {n}");
        let weighted =
            &c.all_equal + &c.one_pair_equal * 3u32 + &c.cyclic * 2u32 + &c.generic * 6u32;
        assert_eq!(weighted, &f * &f, "n = {n}");
    }
}

#[test]
fn class_counts_grow_like_a_sixth_of_the_square() {
    for n in 3..=12 {
        let f = factorial(n);
        let k = class_count(n).unwrap();
        let sq = &f * &f;
        assert!(&k * 6u32 >= sq, "n = {n}");
        assert!(&k * 6u32 <= &sq + &f * 3u32 + &f * 2u32 + 2u32, "n = {n}");
    }
}
