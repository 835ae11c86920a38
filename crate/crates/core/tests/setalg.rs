use std::collections::BTreeSet;

use proptest::prelude::*;
use ultralpa::error::{Error, LemmaPrecondition};
use ultralpa::setalg::{
    exception_bound, indistinguishable_pair, indistinguishable_pair_from, signature, AlgebraContext, Cardinality,
    MembershipCertificate,
};
use ultralpa::{Universe, UpSet};

fn evens() -> UpSet {
    UpSet::periodic(0, 2, [0], []).unwrap()
}

fn members(x: &UpSet, below: u64) -> BTreeSet<u64> {
    (0..below).filter(|&n| x.contains(n)).collect()
}

/// Denotation of a literal tuple, computed without the library.
fn naive(n: u64, finite: &[u64], threshold: u64, period: u64, residues: &[u64]) -> bool {
    finite.contains(&n) || (n >= threshold && residues.contains(&(n % period)))
}

#[test]
fn finite_union_cofinite() {
    let x = UpSet::finite([1, 2]).union(&UpSet::cofinite([1, 3]));
    assert_eq!(x, UpSet::cofinite([3]));
}

#[test]
fn evens_minus_small_evens() {
    let x = evens().intersection(&UpSet::cofinite([0, 2]));
    let bound = 10 * 2;
    let expected: BTreeSet<u64> = (0..bound).filter(|n| n % 2 == 0 && *n >= 4).collect();
    assert_eq!(members(&x, bound), expected);
    assert_eq!(x.period(), 2);
}

#[test]
fn cardinalities() {
    assert_eq!(UpSet::empty().cardinality(), Cardinality::Finite(0));
    assert_eq!(UpSet::cofinite([5]).cardinality(), Cardinality::Infinite);
    let x = UpSet::periodic(3, 3, [1], []).unwrap().union(&UpSet::singleton(0));
    // 0, 4, 7, 10, ...
    assert_eq!(members(&x, 3 + 3 * 3), BTreeSet::from([0, 4, 7, 10]));
    assert_eq!(x.cardinality(), Cardinality::Infinite);
    assert_eq!(UpSet::finite([2, 9, 4]).cardinality(), Cardinality::Finite(3));
}

#[test]
fn literal_syntax() {
    for (text, set) in [
        ("empty", UpSet::empty()),
        ("all", UpSet::all()),
        ("{1,2,5}", UpSet::finite([1, 2, 5])),
        ("cofinite{0,3}", UpSet::cofinite([0, 3])),
        (
            "periodic(N=4, p=3, r={0,2}, extra={1})",
            UpSet::periodic(4, 3, [0, 2], [1]).unwrap(),
        ),
    ] {
        let parsed: UpSet = text.parse().unwrap();
        assert_eq!(parsed, set, "{text}");
        let again: UpSet = parsed.to_string().parse().unwrap();
        assert_eq!(again, parsed);
    }
}

#[test]
fn membership_in_finite_universe() {
    let ctx = AlgebraContext::new(vec![UpSet::finite([1, 2])], Universe::Finite(6));
    for x in [UpSet::empty(), UpSet::finite([0, 5]), UpSet::prefix(6)] {
        assert!(ctx.in_generated_algebra(&x));
    }
    assert!(ctx.whole_vertex_set_in_g0().is_member());
    assert!(matches!(
        ctx.membership(&UpSet::singleton(6)),
        MembershipCertificate::OutsideUniverse { vertex: 6 }
    ));
}

#[test]
fn cofinite_range_minus_point() {
    let r = UpSet::cofinite([0]);
    let ctx = AlgebraContext::new(vec![r.clone()], Universe::CountablyInfinite);
    assert!(ctx.in_generated_algebra(&r.difference(&UpSet::singleton(7))));
    // ℕ = r ∪ {0}
    match ctx.whole_vertex_set_in_g0() {
        MembershipCertificate::Member {
            union, added, removed, ..
        } => {
            assert_eq!(union.union(&added).difference(&removed), UpSet::all());
            for v in 0..50 {
                assert!(union.contains(v) || added.contains(v));
            }
        }
        other => panic!("{other:?}"),
    }
}

/// Every set reachable from singletons and `gens` inside `0..m` under the
/// three operations, by fixed-point iteration over bitmasks.
fn closure(m: u32, gens: &[u32]) -> BTreeSet<u32> {
    let mut sets: BTreeSet<u32> = (0..m).map(|v| 1 << v).collect();
    sets.extend(gens.iter().copied());
    loop {
        let cur: Vec<u32> = sets.iter().copied().collect();
        let before = sets.len();
        for &a in &cur {
            for &b in &cur {
                sets.insert(a | b);
                sets.insert(a & b);
                sets.insert(a & !b);
            }
        }
        if sets.len() == before {
            return sets;
        }
    }
}

#[test]
fn finite_ranges_never_reach_a_cofinite_set() {
    // truncate ℕ to 10: finite generators and singletons only ever produce
    // subsets of the truncation, so membership is decided by finiteness
    let gens = [UpSet::finite([1, 2]), UpSet::finite([4])];
    let masks: Vec<u32> = gens
        .iter()
        .map(|g| (0..10).filter(|&v| g.contains(v)).fold(0, |m, v| m | 1 << v))
        .collect();
    let closed = closure(10, &masks);
    assert!(closed.contains(&0b11_1111_1111));
    let ctx = AlgebraContext::new(gens.to_vec(), Universe::CountablyInfinite);
    assert!(!ctx.in_generated_algebra(&UpSet::cofinite([3])));
    assert!(!ctx.whole_vertex_set_in_g0().is_member());
    assert!(ctx.in_generated_algebra(&UpSet::prefix(10)));
}

#[test]
fn cofinite_range_makes_universe_generated() {
    let ctx = AlgebraContext::new(
        vec![UpSet::finite([0]), UpSet::cofinite([0, 1])],
        Universe::CountablyInfinite,
    );
    let cert = ctx.whole_vertex_set_in_g0();
    let MembershipCertificate::Member {
        union, added, removed, ..
    } = cert
    else {
        panic!("expected membership");
    };
    for v in 0..40 {
        assert!(union.contains(v) && !removed.contains(v) || added.contains(v));
    }
}

#[test]
fn signatures() {
    let xs = [UpSet::cofinite([0, 1]), UpSet::finite([2, 5])];
    assert_eq!(signature(6, &xs), vec![true, false]);
    assert_eq!(signature(2, &xs), vec![true, true]);
    assert_eq!(signature(3, &[]), Vec::<bool>::new());
}

fn pair_ctx() -> (AlgebraContext, Vec<UpSet>) {
    let xs = vec![UpSet::cofinite([0, 1]), UpSet::finite([2, 5])];
    (AlgebraContext::new(xs.clone(), Universe::CountablyInfinite), xs)
}

/// Smallest `(s, t)` with `s ∈ A∩S`, `t ∈ A∖S`, `s, t ≥ lower`, equal
/// signatures, found by scanning every pair below `limit`.
fn scan_pair(xs: &[UpSet], s: &UpSet, a: &UpSet, lower: u64, limit: u64) -> Option<(u64, u64)> {
    for sv in lower..limit {
        if !(a.contains(sv) && s.contains(sv)) {
            continue;
        }
        for t in lower..limit {
            if a.contains(t) && !s.contains(t) && xs.iter().all(|x| x.contains(sv) == x.contains(t)) {
                return Some((sv, t));
            }
        }
    }
    None
}

#[test]
fn pair_past_the_exception_bound() {
    let (ctx, xs) = pair_ctx();
    let bound = exception_bound(&xs);
    assert_eq!(bound, 6);
    let got = indistinguishable_pair_from(&ctx, &xs, &evens(), &UpSet::all(), bound).unwrap();
    assert_eq!(got, (6, 7));
    assert_eq!(scan_pair(&xs, &evens(), &UpSet::all(), bound, 2 * bound), Some(got));
}

#[test]
fn pair_without_lower_bound_is_smallest_overall() {
    let (ctx, xs) = pair_ctx();
    let got = indistinguishable_pair(&ctx, &xs, &evens(), &UpSet::all()).unwrap();
    assert_eq!(Some(got), scan_pair(&xs, &evens(), &UpSet::all(), 0, 12));
    assert_eq!(got, (0, 1));
}

#[test]
fn pair_with_no_sets() {
    // the context still has to generate A = ℕ
    let ctx = AlgebraContext::new(vec![UpSet::all()], Universe::CountablyInfinite);
    let got = indistinguishable_pair(&ctx, &[], &evens(), &UpSet::all()).unwrap();
    assert_eq!(got, (0, 1));
}

#[test]
fn pair_rejects_finite_intersection() {
    let (ctx, xs) = pair_ctx();
    let err = indistinguishable_pair(&ctx, &xs, &UpSet::finite([2, 4]), &UpSet::all()).unwrap_err();
    match err {
        Error::PreconditionViolated(v) => {
            assert!(v.contains(&LemmaPrecondition::IntersectionFinite));
            assert!(v.contains(&LemmaPrecondition::IntersectionGeneralized));
        }
        other => panic!("{other:?}"),
    }
}

fn arb_upset() -> impl Strategy<Value = UpSet> {
    (
        prop::collection::btree_set(0u64..12, 0..4),
        0u64..8,
        1u64..5,
        prop::collection::btree_set(0u64..5, 0..3),
    )
        .prop_map(|(finite, n, p, r)| {
            let r: Vec<u64> = r.into_iter().filter(|&x| x < p).collect();
            UpSet::periodic(n, p, r, finite.into_iter().filter(|&x| x < n)).unwrap()
        })
}

fn bound(a: &UpSet, b: &UpSet) -> u64 {
    a.threshold().max(b.threshold()) + 3 * num_integer::lcm(a.period(), b.period())
}

proptest! {
    #[test]
    fn ops_match_pointwise(a in arb_upset(), b in arb_upset()) {
        let u = a.union(&b);
        let i = a.intersection(&b);
        let d = a.difference(&b);
        for n in 0..bound(&a, &b) {
            prop_assert_eq!(u.contains(n), a.contains(n) || b.contains(n));
            prop_assert_eq!(i.contains(n), a.contains(n) && b.contains(n));
            prop_assert_eq!(d.contains(n), a.contains(n) && !b.contains(n));
        }
        let l = num_integer::lcm(a.period(), b.period());
        prop_assert_eq!(l % u.period(), 0);
        prop_assert_eq!(l % i.period(), 0);
        prop_assert_eq!(l % d.period(), 0);
    }

    #[test]
    fn literal_denotation(
        finite in prop::collection::vec(0u64..10, 0..4),
        n in 0u64..10,
        p in 1u64..6,
        r in prop::collection::vec(0u64..6, 0..3),
    ) {
        let r: Vec<u64> = r.into_iter().filter(|&x| x < p).collect();
        let extra: Vec<u64> = finite.into_iter().filter(|&x| x < n).collect();
        let x = UpSet::periodic(n, p, r.clone(), extra.clone()).unwrap();
        for k in 0..n + 4 * p {
            prop_assert_eq!(x.contains(k), naive(k, &extra, n, p, &r));
        }
        prop_assert_eq!(x.is_finite(), x.residues().is_empty());
    }

    #[test]
    fn canonical_forms_are_unique(bits in prop::collection::vec(any::<bool>(), 1..64)) {
        // a finite set equals its own complement-of-complement and any
        // reconstruction from its members
        let members: Vec<u64> = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64).collect();
        let x = UpSet::finite(members.clone());
        let y = UpSet::all().difference(&UpSet::all().difference(&x));
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.clone().normalized(), x.clone());
        let z = members.iter().fold(UpSet::empty(), |acc, &m| acc.union(&UpSet::singleton(m)));
        prop_assert_eq!(z, x);
    }

    #[test]
    fn equal_denotations_equal_forms(a in arb_upset(), b in arb_upset()) {
        // (a ∪ b) ∖ b ∪ (a ∩ b) denotes a
        let c = a.union(&b).difference(&b).union(&a.intersection(&b));
        prop_assert_eq!(c.clone().normalized(), c.clone());
        prop_assert_eq!(c, a);
    }

    #[test]
    fn cells_partition_the_generators(gens in prop::collection::vec(arb_upset(), 0..4)) {
        let ctx = AlgebraContext::new(gens.clone(), Universe::CountablyInfinite);
        let total = gens.iter().fold(UpSet::empty(), |acc, g| acc.union(g));
        let cells = ctx.cells();
        let union = cells.iter().fold(UpSet::empty(), |acc, c| acc.union(&c.set));
        prop_assert_eq!(union, total);
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                prop_assert!(a.set.is_disjoint(&b.set));
            }
        }
    }

    #[test]
    fn generators_and_cells_are_members(gens in prop::collection::vec(arb_upset(), 1..4)) {
        let ctx = AlgebraContext::new(gens.clone(), Universe::CountablyInfinite);
        for g in &gens {
            prop_assert!(ctx.in_generated_algebra(g));
        }
        for c in ctx.cells() {
            prop_assert!(ctx.in_generated_algebra(&c.set));
        }
    }
}
