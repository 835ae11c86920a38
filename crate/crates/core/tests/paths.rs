use std::collections::BTreeSet;

use proptest::prelude::*;
use ultralpa::corpus;
use ultralpa::paths::{
    decompose_components, enumerate_paths, exits_of, find_cycles, infinite_path_witness,
    infinite_paths_end_in_sink_or_cycle, is_no_exit, no_exit_witness, ComponentKind, ExitWitness, Path,
};
use ultralpa::setalg::Cardinality;
use ultralpa::{Edge, Ultragraph, Universe, UpSet};

fn graph(universe: Universe, edges: &[(&str, u64, UpSet)]) -> Ultragraph {
    Ultragraph::new(
        universe,
        edges.iter().map(|(id, s, r)| Edge::new(*id, *s, r.clone())).collect(),
    )
}

fn p(es: &[usize]) -> Path {
    Path::Edges(es.to_vec())
}

#[test]
fn enumeration_examples() {
    let g = graph(Universe::Finite(1), &[]);
    assert_eq!(enumerate_paths(&g, 0, 5), vec![Path::Trivial(0)]);

    let g = graph(Universe::Finite(1), &[("e", 0, UpSet::singleton(0))]);
    assert_eq!(
        enumerate_paths(&g, 0, 3),
        vec![Path::Trivial(0), p(&[0]), p(&[0, 0]), p(&[0, 0, 0])]
    );

    let g = graph(
        Universe::Finite(3),
        &[("e1", 0, UpSet::finite([1, 2])), ("e2", 1, UpSet::singleton(0))],
    );
    // e1 then e2 is the only continuation: s(e2) = 1 ∈ r(e1), s(e1) = 0 ∉ r(e1)
    let got: BTreeSet<Path> = enumerate_paths(&g, 0, 2).into_iter().collect();
    assert_eq!(got, BTreeSet::from([Path::Trivial(0), p(&[0]), p(&[0, 1])]));
}

#[test]
fn cycle_examples() {
    let chain = graph(
        Universe::Finite(3),
        &[("e1", 0, UpSet::singleton(1)), ("e2", 1, UpSet::singleton(2))],
    );
    assert!(find_cycles(&chain).is_empty());
    let g = graph(
        Universe::Finite(6),
        &[("e1", 0, UpSet::singleton(1)), ("e2", 1, UpSet::finite([0, 5]))],
    );
    assert_eq!(find_cycles(&g), vec![p(&[0, 1])]);
}

#[test]
fn exit_examples() {
    let g = graph(Universe::Finite(1), &[("e", 0, UpSet::singleton(0))]);
    assert!(exits_of(&g, &p(&[0])).is_empty());

    // a sink w in r(α₁)
    let g = graph(Universe::Finite(2), &[("e", 0, UpSet::finite([0, 1]))]);
    assert_eq!(
        exits_of(&g, &p(&[0])),
        vec![ExitWitness::Sink {
            sinks: UpSet::singleton(1),
            index: 1
        }]
    );

    let g = graph(
        Universe::Finite(1),
        &[("e", 0, UpSet::singleton(0)), ("f", 0, UpSet::singleton(0))],
    );
    for c in [p(&[0]), p(&[1])] {
        assert!(exits_of(&g, &c).iter().any(|x| matches!(x, ExitWitness::Edge { .. })));
    }
}

#[test]
fn no_exit_examples() {
    let isolated = graph(Universe::Finite(1), &[("e", 0, UpSet::singleton(0))]);
    assert!(is_no_exit(&isolated));
    let wide = graph(Universe::Finite(2), &[("e", 0, UpSet::finite([0, 1]))]);
    let w = no_exit_witness(&wide).unwrap();
    assert_eq!(w.cycle, p(&[0]));
    let chain = graph(Universe::Finite(2), &[("e", 0, UpSet::singleton(1))]);
    assert!(is_no_exit(&chain));
}

#[test]
fn infinite_path_examples() {
    let chain = graph(Universe::Finite(2), &[("e", 0, UpSet::singleton(1))]);
    assert!(infinite_paths_end_in_sink_or_cycle(&chain));

    let two_loops = graph(
        Universe::Finite(1),
        &[("e", 0, UpSet::singleton(0)), ("f", 0, UpSet::singleton(0))],
    );
    let w = infinite_path_witness(&two_loops).unwrap();
    assert_eq!(w.successors, (0, 1));
    assert_eq!(w.walks.0.first(), Some(&w.node));
    assert_eq!(w.walks.0.last(), Some(&w.node));

    let with_exit = graph(
        Universe::Finite(4),
        &[
            ("e1", 0, UpSet::singleton(1)),
            ("e2", 1, UpSet::finite([0, 2])),
            ("f", 2, UpSet::singleton(3)),
        ],
    );
    assert!(infinite_paths_end_in_sink_or_cycle(&with_exit));
    assert!(!is_no_exit(&with_exit));
}

#[test]
fn component_examples() {
    let d = decompose_components(&graph(Universe::Finite(1), &[("e", 0, UpSet::singleton(0))]));
    assert_eq!(d.components.len(), 1);
    assert_eq!(d.components[0].kind, ComponentKind::IsolatedLoop);

    let d = decompose_components(&graph(Universe::Finite(2), &[("e", 0, UpSet::singleton(1))]));
    assert_eq!(d.components[0].kind, ComponentKind::AcyclicRowFiniteSinks);

    let d = decompose_components(&graph(Universe::Finite(2), &[("e", 0, UpSet::finite([0, 1]))]));
    assert_eq!(d.components[0].kind, ComponentKind::Other);

    let d = decompose_components(&graph(Universe::CountablyInfinite, &[("e", 0, UpSet::singleton(1))]));
    assert_eq!(d.residual.count, Cardinality::Infinite);
    assert_eq!(d.residual.vertices, UpSet::cofinite([0, 1]));
}

/// All ultragraphs on `finite(n)`, `n ≤ max_n`, with up to `max_edges`
/// edges, any sources and nonempty ranges. Edge order is kept.
fn all_small(max_n: u64, max_edges: usize) -> Vec<Ultragraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let choices: Vec<(u64, u32)> = (0..n).flat_map(|s| (1u32..1 << n).map(move |r| (s, r))).collect();
        let mut stack: Vec<(usize, Vec<(u64, u32)>)> = vec![(0, vec![])];
        while let Some((from, es)) = stack.pop() {
            out.push(Ultragraph::new(
                Universe::Finite(n),
                es.iter()
                    .enumerate()
                    .map(|(i, &(s, r))| {
                        Edge::new(format!("e{i}"), s, UpSet::finite((0..n).filter(|v| r >> v & 1 == 1)))
                    })
                    .collect(),
            ));
            if es.len() < max_edges {
                for i in from..choices.len() {
                    let mut next = es.clone();
                    next.push(choices[i]);
                    stack.push((i, next));
                }
            }
        }
    }
    out
}

/// Cycles by brute force over edge sequences, rotated to start at their
/// least edge index.
fn cycles_by_search(g: &Ultragraph) -> BTreeSet<Path> {
    let m = g.edges.len();
    let mut out = BTreeSet::new();
    let mut seqs: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    while let Some(s) = seqs.pop() {
        let valid = s.windows(2).all(|w| g.edges[w[0]].range.contains(g.edges[w[1]].source));
        if !valid {
            continue;
        }
        let sources: BTreeSet<u64> = s.iter().map(|&i| g.edges[i].source).collect();
        let closed = g.edges[*s.last().unwrap()].range.contains(g.edges[s[0]].source);
        if closed && sources.len() == s.len() {
            let k = (0..s.len()).min_by_key(|&i| s[i]).unwrap();
            let mut r = s[k..].to_vec();
            r.extend_from_slice(&s[..k]);
            out.insert(Path::Edges(r));
        }
        if s.len() < m {
            for i in 0..m {
                let mut t = s.clone();
                t.push(i);
                seqs.push(t);
            }
        }
    }
    out
}

/// Decision by bounded walks: the nodes some walk of length `2m + 2`
/// revisits are those on a closed walk of length at most `2m + 1`; each must
/// have exactly one successor that can walk back to it.
fn infinite_paths_by_walks(g: &Ultragraph) -> bool {
    let m = g.edges.len();
    let step = |a: usize, b: usize| g.edges[a].range.contains(g.edges[b].source);
    // reach[k][a][b]: a walk of exactly k + 1 steps from a to b
    let mut reach = vec![vec![vec![false; m]; m]; 2 * m + 1];
    for a in 0..m {
        for b in 0..m {
            reach[0][a][b] = step(a, b);
        }
    }
    for k in 1..reach.len() {
        for a in 0..m {
            for b in 0..m {
                reach[k][a][b] = (0..m).any(|c| reach[k - 1][a][c] && step(c, b));
            }
        }
    }
    let back = |a: usize, b: usize| a == b || reach.iter().any(|r| r[a][b]);
    (0..m)
        .filter(|&x| reach.iter().any(|r| r[x][x]))
        .all(|x| (0..m).filter(|&y| step(x, y) && back(y, x)).count() == 1)
}

#[test]
fn cycle_search_matches_exhaustively() {
    for g in all_small(3, 3) {
        let got: BTreeSet<Path> = find_cycles(&g).into_iter().collect();
        assert_eq!(got, cycles_by_search(&g), "{g:?}");
        for c in &got {
            assert!(c.is_cycle(&g));
        }
    }
}

#[test]
fn infinite_path_decision_matches_walks() {
    for g in all_small(4, 3) {
        assert_eq!(
            infinite_paths_end_in_sink_or_cycle(&g),
            infinite_paths_by_walks(&g),
            "{g:?}"
        );
    }
}

#[test]
fn no_exit_is_the_degree_condition() {
    for g in all_small(3, 3) {
        let literal = find_cycles(&g).iter().all(|c| {
            c.edges().iter().all(|&i| {
                let e = &g.edges[i];
                g.out_degree(e.source) == 1 && e.range.cardinality() == Cardinality::Finite(1)
            })
        });
        assert_eq!(is_no_exit(&g), literal, "{g:?}");
    }
}

proptest! {
    #[test]
    fn concatenation_validity(seed in 0u64..400) {
        let g = corpus::random_ultragraph(seed);
        let starts: Vec<u64> = g.emitters().iter().collect();
        let paths: Vec<Path> = starts
            .iter()
            .flat_map(|&v| enumerate_paths(&g, v, 2))
            .filter(|p| !p.is_trivial())
            .collect();
        for a in &paths {
            prop_assert!(a.is_valid(&g));
            for b in &paths {
                let mut es = a.edges().to_vec();
                es.extend_from_slice(b.edges());
                let joined = Path::Edges(es);
                prop_assert_eq!(joined.is_valid(&g), a.range(&g).contains(b.source(&g)));
            }
        }
    }

    #[test]
    fn vertex_classes_match_sets(seed in 0u64..400) {
        let g = corpus::random_ultragraph(seed);
        let sinks = g.sink_set();
        let sources = g.source_set();
        for v in 0..g.window_bound() {
            if !g.universe.contains(v) {
                continue;
            }
            let c = g.classify_vertex(v).unwrap();
            prop_assert!(!c.is_infinite_emitter);
            prop_assert_eq!(c.is_sink, sinks.contains(v));
            prop_assert_eq!(c.is_source, sources.contains(v));
            prop_assert_eq!(c.is_regular, !c.is_sink && !c.is_infinite_emitter);
        }
        let conj = g.edges.iter().all(|e| e.range.cardinality().is_finite());
        prop_assert_eq!(g.is_row_finite(), conj);
    }
}
