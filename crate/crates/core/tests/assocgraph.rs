use proptest::prelude::*;
use ultralpa::assocgraph::{build_assoc_graph, check_lemmas, compute_delta, count_paths, EVertex, Side, Word};
use ultralpa::corpus;
use ultralpa::setalg::Cardinality;
use ultralpa::{Edge, Ultragraph, Universe, UpSet};

fn graph(universe: Universe, edges: &[(&str, u64, UpSet)]) -> Ultragraph {
    Ultragraph::new(
        universe,
        edges.iter().map(|(id, s, r)| Edge::new(*id, *s, r.clone())).collect(),
    )
}

fn w(bits: &[u8]) -> Word {
    Word(bits.iter().map(|&b| b == 1).collect())
}

fn evens() -> UpSet {
    UpSet::periodic(0, 2, [0], []).unwrap()
}

// corpus sets have thresholds below 8 and periods dividing 6, so past 8 a
// full period of 6 decides whether a set is infinite
const FAR: std::ops::Range<u64> = 64..70;

/// Membership of `v` in `r(ω)`, straight from the definition.
fn in_word_range(g: &Ultragraph, word: &[bool], v: u64) -> bool {
    word.iter().zip(&g.edges).all(|(&b, e)| e.range.contains(v) == b)
}

/// `Δ` by trying every nonzero word, level by level.
fn delta_by_search(g: &Ultragraph) -> Vec<Vec<Word>> {
    (1..=g.edges.len())
        .map(|n| {
            (1u32..1 << n)
                .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<bool>>())
                .filter(|word| FAR.clone().any(|v| in_word_range(g, word, v)))
                .map(Word)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect()
}

#[test]
fn all_finite_ranges() {
    let g = graph(
        Universe::CountablyInfinite,
        &[("a", 0, UpSet::finite([1, 2])), ("b", 3, UpSet::finite([0]))],
    );
    let e = build_assoc_graph(&g).unwrap();
    assert!(e.delta.is_empty());
    assert!(e.is_edge_splitting());
    assert!(e.bar_word_edges().next().is_none());
    for (edge, xs) in g.edges.iter().zip(&e.x_sets) {
        let vs: Vec<EVertex> = edge.range.iter().map(EVertex::Vertex).collect();
        assert_eq!(xs, &vs);
    }
}

#[test]
fn single_cofinite_edge() {
    let g = graph(Universe::CountablyInfinite, &[("e1", 0, UpSet::cofinite([0]))]);
    let d = compute_delta(&g).unwrap();
    assert_eq!(d.delta, vec![vec![w(&[1])]]);
    assert_eq!(d.gamma0, vec![w(&[1])]);
    assert!(d.gamma_plus.is_empty());
    assert_eq!(d.w_plus, g.edges[0].range);
    for v in 1..20 {
        assert_eq!(d.sigma(v), Some(&w(&[1])));
    }
}

#[test]
fn two_even_edges() {
    let g = graph(Universe::CountablyInfinite, &[("e1", 0, evens()), ("e2", 1, evens())]);
    let d = compute_delta(&g).unwrap();
    assert_eq!(d.delta, vec![vec![w(&[1])], vec![w(&[1, 1])]]);
    for v in (0..20).step_by(2) {
        assert_eq!(d.sigma(v), Some(&w(&[1, 1])));
    }
    assert_eq!(d.sigma(3), None);
    let e = build_assoc_graph(&g).unwrap();
    let bars: Vec<(Word, &Word)> = e.bar_word_edges().collect();
    assert_eq!(bars, vec![(w(&[1]), &w(&[1, 1]))]);
    // X(e₂) = {(1,1)}: no vertex of r(e₂) has a word shorter than 2
    assert_eq!(e.x_sets[1], vec![EVertex::Word(w(&[1, 1]))]);
}

#[test]
fn count_examples() {
    let split = graph(Universe::Finite(3), &[("e", 0, UpSet::finite([1, 2]))]);
    let e = build_assoc_graph(&split).unwrap();
    for target in [1, 2] {
        assert_eq!(count_paths(&e, Side::Ultragraph, 0, target, 2), vec![0, 1, 0]);
        assert_eq!(count_paths(&e, Side::Assoc, 0, target, 2), vec![0, 1, 0]);
    }
    let cof = graph(Universe::CountablyInfinite, &[("e1", 0, UpSet::cofinite([0]))]);
    let e = build_assoc_graph(&cof).unwrap();
    assert_eq!(count_paths(&e, Side::Assoc, 0, 7, 3), vec![0, 1, 0, 0]);
    assert_eq!(count_paths(&e, Side::Assoc, 0, 0, 3), vec![1, 0, 0, 0]);
}

#[test]
fn lemma_sides_on_a_cofinite_edge() {
    let g = graph(Universe::CountablyInfinite, &[("e", 0, UpSet::cofinite([0]))]);
    let e = build_assoc_graph(&g).unwrap();
    let c = check_lemmas(&e);
    let get = |name: &str| c.iter().find(|x| x.name == name).unwrap();
    let str_eq = get("str_row_finite_equiv");
    assert!(!str_eq.left && !str_eq.right);
    let empty = get("delta_empty_row_finite");
    assert!(!empty.left && !empty.right);
}

fn infinite_corpus() -> Vec<Ultragraph> {
    corpus::random_corpus(0, 300)
        .into_iter()
        .filter(|g| g.universe == Universe::CountablyInfinite)
        .collect()
}

#[test]
fn delta_matches_search() {
    for g in infinite_corpus() {
        assert_eq!(compute_delta(&g).unwrap().delta, delta_by_search(&g), "{g:?}");
    }
}

#[test]
fn delta_is_empty_on_finite_universes() {
    for g in corpus::random_corpus(0, 300) {
        if let Universe::Finite(_) = g.universe {
            assert!(compute_delta(&g).unwrap().is_empty());
        }
    }
}

proptest! {
    #[test]
    fn structure_invariants(seed in 0u64..2000) {
        let g = corpus::random_ultragraph(seed);
        let e = build_assoc_graph(&g).unwrap();
        let d = &e.delta;
        for word in &d.gamma_plus {
            prop_assert!(d.contains(&word.restrict(word.len() - 1)));
        }
        for word in &d.gamma0 {
            prop_assert!(word.is_gamma0());
        }
        prop_assert_eq!(d.gamma0.len() + d.gamma_plus.len(), d.len());
        // σ⁻¹ partitions W₊, with v ∈ r(σ(v))
        for v in 0..80 {
            let owners: Vec<&Word> = d.sigma_inverse.iter().filter(|(_, s)| s.contains(v)).map(|(w, _)| w).collect();
            prop_assert_eq!(owners.len(), usize::from(d.w_plus.contains(v)));
            if let Some(word) = owners.first() {
                prop_assert!(in_word_range(&g, &word.0, v));
                // the longest such word
                prop_assert!(d.words().all(|x| x.len() <= word.len() || !in_word_range(&g, &x.0, v)));
            }
        }
        for (n, xs) in e.x_sets.iter().enumerate() {
            prop_assert!(!xs.is_empty(), "X(e{}) empty", n + 1);
        }
    }

    #[test]
    fn regular_vertices(seed in 0u64..2000) {
        let g = corpus::random_ultragraph(seed);
        let e = build_assoc_graph(&g).unwrap();
        for v in 0..g.window_bound() {
            if g.universe.contains(v) {
                let reg = g.classify_vertex(v).unwrap().is_regular;
                prop_assert_eq!(e.is_regular(&EVertex::Vertex(v)), reg);
            }
        }
        // words never sink; a word is irregular only by emitting infinitely
        // many bar edges, which is what the row-finite check reports
        for word in e.delta.words() {
            let x = EVertex::Word(word.clone());
            prop_assert!(e.out_degree(&x) != Cardinality::Finite(0));
            prop_assert_eq!(e.is_regular(&x), !e.infinite_emitters().contains(word));
        }
    }

    #[test]
    fn total_path_counts_agree(seed in 0u64..300) {
        let g = corpus::random_ultragraph(seed);
        let e = build_assoc_graph(&g).unwrap();
        for v in 0..6u64 {
            for t in 0..6u64 {
                if !g.universe.contains(v) || !g.universe.contains(t) {
                    continue;
                }
                let a: u64 = count_paths(&e, Side::Ultragraph, v, t, 4).iter().sum();
                let b: u64 = count_paths(&e, Side::Assoc, v, t, 4).iter().sum();
                prop_assert_eq!(a, b, "{} → {}", v, t);
            }
        }
    }
}
