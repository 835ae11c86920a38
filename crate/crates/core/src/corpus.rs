//! Seeded instance generators shared by the tests and the `corpus` command.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::setalg::{AlgebraContext, Universe, UpSet, Vertex};
use crate::ultragraph::{Edge, Ultragraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite, cofinite, or periodic, with small parameters, never empty.
/// Over a finite universe the result is cut down to it.
pub fn random_upset<R: Rng>(rng: &mut R, universe: Universe) -> UpSet {
    let small = |rng: &mut R, n: usize, below: u64| -> Vec<u64> { (0..n).map(|_| rng.gen_range(0..below)).collect() };
    loop {
        let s = match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(1..=3);
                UpSet::finite(small(rng, k, 8))
            }
            1 => {
                let k = rng.gen_range(0..=2);
                UpSet::cofinite(small(rng, k, 8))
            }
            _ => {
                let p = rng.gen_range(2..=3);
                let n = rng.gen_range(0..=4);
                let k = rng.gen_range(1..p as usize);
                let r: BTreeSet<u64> = small(rng, k, p).into_iter().collect();
                let k = rng.gen_range(0..=2);
                let extra = small(rng, k, n.max(1));
                UpSet::periodic(n, p, r, extra.into_iter().filter(|&x| x < n)).expect("valid parameters")
            }
        };
        let s = s.intersection(&universe.as_set());
        if !s.is_empty() {
            return s;
        }
    }
}

/// Universe ℕ or `finite(1..=6)`, at most four edges with mixed ranges.
pub fn random_ultragraph(seed: u64) -> Ultragraph {
    let mut rng = rng(seed);
    let universe = if rng.gen_bool(0.5) {
        Universe::CountablyInfinite
    } else {
        Universe::Finite(rng.gen_range(1..=6))
    };
    let source_bound = match universe {
        Universe::Finite(m) => m,
        Universe::CountablyInfinite => 6,
    };
    let edges = (0..rng.gen_range(0..=4))
        .map(|i| {
            let source = rng.gen_range(0..source_bound);
            Edge::new(format!("e{}", i + 1), source, random_upset(&mut rng, universe))
        })
        .collect();
    Ultragraph::new(universe, edges)
}

/// `count` random ultragraphs from consecutive seeds.
pub fn random_corpus(seed: u64, count: usize) -> Vec<Ultragraph> {
    (0..count as u64)
        .map(|i| random_ultragraph(seed.wrapping_add(i)))
        .collect()
}

type Shape = Vec<(u64, u32)>;

fn canonical(n: u64, edges: &[(u64, u32)]) -> Shape {
    let mut perm: Vec<u64> = (0..n).collect();
    let mut best: Option<Shape> = None;
    permute(&mut perm, 0, &mut |p| {
        let mut img: Shape = edges
            .iter()
            .map(|&(s, r)| {
                let r2 = (0..n)
                    .filter(|&v| r >> v & 1 == 1)
                    .fold(0u32, |acc, v| acc | 1 << p[v as usize]);
                (p[s as usize], r2)
            })
            .collect();
        img.sort_unstable();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    });
    best.unwrap()
}

fn permute(p: &mut Vec<u64>, k: usize, f: &mut impl FnMut(&[u64])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn acyclic(n: u64, edges: &[(u64, u32)]) -> bool {
    // v → u whenever an edge from v reaches u; a cycle in this relation is
    // exactly a cycle of edges with distinct sources
    let mut indeg = vec![0usize; n as usize];
    let succ: Vec<u32> = (0..n)
        .map(|v| edges.iter().filter(|e| e.0 == v).fold(0u32, |a, e| a | e.1))
        .collect();
    for s in &succ {
        for u in 0..n {
            if s >> u & 1 == 1 {
                indeg[u as usize] += 1;
            }
        }
    }
    let mut stack: Vec<u64> = (0..n).filter(|&v| indeg[v as usize] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for u in 0..n {
            if succ[v as usize] >> u & 1 == 1 {
                indeg[u as usize] -= 1;
                if indeg[u as usize] == 0 {
                    stack.push(u);
                }
            }
        }
    }
    seen == n
}

/// Every finite acyclic ultragraph with `1..=max_vertices` vertices, at most
/// `max_edges` edges, and ranges of at most `max_range` vertices, up to
/// relabelling vertices and reordering edges.
pub fn exhaustive_finite_acyclic(max_vertices: u64, max_edges: usize, max_range: u32) -> Vec<Ultragraph> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let mut choices = Vec::new();
        for s in 0..n {
            for r in 1u32..(1 << n) {
                if r >> s & 1 == 0 && r.count_ones() <= max_range {
                    choices.push((s, r));
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<(usize, Vec<(u64, u32)>)> = vec![(0, Vec::new())];
        // multisets of choices, grown in nondecreasing index order
        while let Some((from, edges)) = stack.pop() {
            if !acyclic(n, &edges) {
                continue;
            }
            if seen.insert(canonical(n, &edges)) {
                out.push((n, edges.clone()));
            }
            if edges.len() < max_edges {
                for i in from..choices.len() {
                    let mut next = edges.clone();
                    next.push(choices[i]);
                    stack.push((i, next));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));
    out.into_iter()
        .map(|(n, edges)| {
            let edges = edges
                .iter()
                .enumerate()
                .map(|(i, &(s, r))| {
                    Edge::new(
                        format!("e{}", i + 1),
                        s,
                        UpSet::finite((0..n).filter(|&v| r >> v & 1 == 1)),
                    )
                })
                .collect();
            Ultragraph::new(Universe::Finite(n), edges)
        })
        .collect()
}

/// Inputs of the indistinguishable-pair search.
#[derive(Clone, Debug)]
pub struct PairInstance {
    pub context: AlgebraContext,
    pub sets: Vec<UpSet>,
    pub s: UpSet,
    pub a: UpSet,
}

/// With `infinite`, retries a few times for an infinite member; contexts
/// whose cells are all finite have none.
fn random_member<R: Rng>(rng: &mut R, ctx: &AlgebraContext, infinite: bool) -> UpSet {
    for attempt in 0.. {
        let mut x = ctx
            .cells()
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .fold(UpSet::empty(), |acc, c| acc.union(&c.set));
        for _ in 0..rng.gen_range(0..=1) {
            x = x.union(&UpSet::singleton(rng.gen_range(0..10)));
        }
        if !infinite || !x.is_finite() || attempt == 16 {
            return x;
        }
    }
    unreachable!()
}

fn instance<R: Rng>(rng: &mut R) -> PairInstance {
    let gens: Vec<UpSet> = (0..rng.gen_range(1..=3))
        .map(|_| random_upset(rng, Universe::CountablyInfinite))
        .collect();
    let context = AlgebraContext::new(gens, Universe::CountablyInfinite);
    let sets = (0..rng.gen_range(0..=3))
        .map(|_| random_member(rng, &context, false))
        .collect();
    let a = random_member(rng, &context, true);
    let p = *[5u64, 7].choose(rng).unwrap();
    let n = rng.gen_range(0..=4);
    let r: Vec<u64> = (0..rng.gen_range(1..p)).map(|_| rng.gen_range(0..p)).collect();
    let s = UpSet::periodic(n, p, r, []).expect("valid parameters");
    PairInstance { context, sets, s, a }
}

fn satisfies_preconditions(i: &PairInstance) -> bool {
    let ctx = &i.context;
    let inside = i.a.intersection(&i.s);
    i.sets.iter().all(|x| ctx.in_generated_algebra(x))
        && ctx.in_generated_algebra(&i.a)
        && !inside.is_finite()
        && !i.a.difference(&i.s).is_finite()
        && !ctx.in_generated_algebra(&inside)
}

/// Instances meeting every precondition of the pair search.
pub fn pair_instances(seed: u64, count: usize) -> Vec<PairInstance> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let i = instance(&mut rng);
        if satisfies_preconditions(&i) {
            out.push(i);
        }
    }
    out
}

/// Instances breaking at least one precondition.
pub fn adversarial_pair_instances(seed: u64, count: usize) -> Vec<PairInstance> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let mut i = instance(&mut rng);
        match out.len() % 4 {
            0 => i.s = UpSet::finite((0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..10))),
            1 => i.s = i.a.clone(),
            2 => i.sets.push(UpSet::periodic(0, 11, [0], []).unwrap()),
            _ => i.a = UpSet::finite([rng.gen_range(0..10) as Vertex]),
        }
        if !satisfies_preconditions(&i) {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(random_corpus(9, 20), random_corpus(9, 20));
        for g in random_corpus(0, 50) {
            assert!(g.validate().is_ok(), "{g:?}");
        }
    }

    #[test]
    fn small_exhaustive_counts() {
        // one vertex: nothing but the lone vertex
        assert_eq!(exhaustive_finite_acyclic(1, 4, 4).len(), 1);
        // two vertices: 0, e, 2e (parallel edges)
        assert_eq!(exhaustive_finite_acyclic(2, 2, 2).len(), 1 + 3);
    }
}
