//! Ultimately periodic subsets of the naturals and the algebra of generalized
//! vertices they generate.
//!
//! An [`UpSet`] is stored as `finite_part ∪ {n ≥ threshold : n mod period ∈ residues}`
//! and is always kept in canonical form (minimal period, then minimal
//! threshold), so structural equality is set equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, LemmaPrecondition};

/// Vertices are natural numbers.
pub type Vertex = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet {
    threshold: u64,
    finite_part: BTreeSet<u64>,
    period: u64,
    residues: BTreeSet<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    Finite(u64),
    Infinite,
}

impl Cardinality {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

impl UpSet {
    pub fn empty() -> Self {
        UpSet {
            threshold: 0,
            finite_part: BTreeSet::new(),
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    pub fn all() -> Self {
        UpSet {
            threshold: 0,
            finite_part: BTreeSet::new(),
            period: 1,
            residues: [0].into(),
        }
    }

    pub fn singleton(v: Vertex) -> Self {
        Self::finite([v])
    }

    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let finite_part: BTreeSet<u64> = elements.into_iter().collect();
        let threshold = finite_part.last().map_or(0, |m| m + 1);
        UpSet {
            threshold,
            finite_part,
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    /// `{0, …, m-1}`.
    pub fn prefix(m: u64) -> Self {
        Self::finite(0..m)
    }

    /// Everything except `missing`.
    pub fn cofinite(missing: impl IntoIterator<Item = u64>) -> Self {
        Self::all().difference(&Self::finite(missing))
    }

    /// `extra ∪ {n ≥ threshold : n mod period ∈ residues}`.
    pub fn periodic(
        threshold: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
        extra: impl IntoIterator<Item = u64>,
    ) -> Result<Self, Error> {
        if period == 0 {
            return Err(Error::InvalidSet("period must be at least 1".into()));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(&r) = residues.iter().find(|&&r| r >= period) {
            return Err(Error::InvalidSet(format!(
                "residue {r} is not below the period {period}"
            )));
        }
        let extra = Self::finite(extra);
        let tail = UpSet {
            threshold,
            finite_part: BTreeSet::new(),
            period,
            residues,
        }
        .normalized();
        Ok(tail.union(&extra))
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn finite_part(&self) -> &BTreeSet<u64> {
        &self.finite_part
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    /// Membership of `n` in the periodic tail, ignoring the threshold.
    pub fn tail_contains(&self, n: u64) -> bool {
        self.residues.contains(&(n % self.period))
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.finite_part.contains(&n)
        } else {
            self.tail_contains(n)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite_part.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn cardinality(&self) -> Cardinality {
        if self.residues.is_empty() {
            Cardinality::Finite(self.finite_part.len() as u64)
        } else {
            Cardinality::Infinite
        }
    }

    pub fn min_element(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Elements in increasing order. Infinite when the set is.
    pub fn iter(&self) -> Iter<'_> {
        Iter { set: self, next: 0 }
    }

    /// Elements strictly below `bound`.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&n| n < bound).collect()
    }

    /// A bound past which membership depends only on the residue mod period.
    pub fn stable_bound(&self) -> u64 {
        self.threshold + self.period
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && b)
    }

    /// Relative complement `self ∖ other`.
    pub fn difference(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &UpSet) -> UpSet {
        self.combine(other, |a, b| a != b)
    }

    pub fn is_subset(&self, other: &UpSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &UpSet) -> bool {
        self.intersection(other).is_empty()
    }

    fn combine(&self, other: &UpSet, op: impl Fn(bool, bool) -> bool) -> UpSet {
        let threshold = self.threshold.max(other.threshold);
        let period = self.period.lcm(&other.period);
        let finite_part = (0..threshold)
            .filter(|&n| op(self.contains(n), other.contains(n)))
            .collect();
        let residues = (0..period)
            .filter(|&r| op(self.tail_contains(r), other.tail_contains(r)))
            .collect();
        UpSet {
            threshold,
            finite_part,
            period,
            residues,
        }
        .normalized()
    }

    /// Build from raw parts and canonicalize. `finite_part` entries at or past
    /// `threshold` are dropped, so callers must pass members below it only.
    pub(crate) fn from_parts(
        threshold: u64,
        finite_part: impl IntoIterator<Item = u64>,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> UpSet {
        assert!(period >= 1);
        UpSet {
            threshold,
            finite_part: finite_part.into_iter().filter(|&n| n < threshold).collect(),
            period,
            residues: residues.into_iter().filter(|&r| r < period).collect(),
        }
        .normalized()
    }

    /// Canonical form: minimal period, then minimal threshold.
    pub fn normalized(mut self) -> UpSet {
        let p = self.period;
        let mut divisors: Vec<u64> = (1..=p).filter(|&d| p.is_multiple_of(d)).collect();
        divisors.sort_unstable();
        for d in divisors {
            if d == p {
                break;
            }
            let periodic = (0..p).all(|r| self.residues.contains(&r) == self.residues.contains(&(r % d)));
            if periodic {
                self.residues.retain(|&r| r < d);
                self.period = d;
                break;
            }
        }
        while self.threshold > 0 {
            let n = self.threshold - 1;
            if self.finite_part.contains(&n) != self.tail_contains(n) {
                break;
            }
            self.finite_part.remove(&n);
            self.threshold = n;
        }
        self
    }
}

pub struct Iter<'a> {
    set: &'a UpSet,
    next: u64,
}

impl Iterator for Iter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let n = self.next;
            if n >= self.set.threshold && self.set.residues.is_empty() {
                return None;
            }
            if n < self.set.threshold {
                match self.set.finite_part.range(n..).next() {
                    Some(&m) => {
                        self.next = m + 1;
                        return Some(m);
                    }
                    None => {
                        self.next = self.set.threshold;
                        continue;
                    }
                }
            }
            self.next = n + 1;
            if self.set.tail_contains(n) {
                return Some(n);
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = u64>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, n) in items.into_iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{n}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.is_empty() {
            if self.finite_part.is_empty() {
                return write!(f, "empty");
            }
            return write_list(f, self.finite_part.iter().copied());
        }
        if self.period == 1 {
            if self.threshold == 0 {
                return write!(f, "all");
            }
            write!(f, "cofinite")?;
            return write_list(f, (0..self.threshold).filter(|n| !self.finite_part.contains(n)));
        }
        write!(f, "periodic(N={}, p={}, r=", self.threshold, self.period)?;
        write_list(f, self.residues.iter().copied())?;
        write!(f, ", extra=")?;
        write_list(f, self.finite_part.iter().copied())?;
        write!(f, ")")
    }
}

impl FromStr for UpSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        crate::dsl::parse_upset(s).map_err(Error::Syntax)
    }
}

impl Serialize for UpSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for UpSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The vertex set `G⁰`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    Finite(u64),
    CountablyInfinite,
}

impl Universe {
    pub fn as_set(&self) -> UpSet {
        match *self {
            Universe::Finite(m) => UpSet::prefix(m),
            Universe::CountablyInfinite => UpSet::all(),
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match *self {
            Universe::Finite(m) => v < m,
            Universe::CountablyInfinite => true,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Universe::Finite(_))
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Finite(m) => write!(f, "finite({m})"),
            Universe::CountablyInfinite => write!(f, "nat"),
        }
    }
}

/// Membership signature of a point with respect to a list of sets.
pub type Signature = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub signature: Signature,
    pub set: UpSet,
}

/// The algebra of generalized vertices generated by singletons and a finite
/// list of edge ranges, decomposed into its atoms ("cells").
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    generators: Vec<UpSet>,
    universe: Universe,
    common_threshold: u64,
    common_period: u64,
    cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipCertificate {
    /// `X = (∪ cells) ∪ added ∖ removed`, with `added` and `removed` finite.
    Member {
        cells: Vec<Signature>,
        union: UpSet,
        added: UpSet,
        removed: UpSet,
    },
    OutsideUniverse {
        vertex: Vertex,
    },
    /// Past `threshold`, the class `residue mod modulus` lies in `X` but in no
    /// generator, so no cell union can match it up to a finite set.
    UncoveredTail {
        threshold: u64,
        modulus: u64,
        residue: u64,
    },
    /// Past `threshold`, the classes `inside` and `outside` fall in the same
    /// cell, yet `X` contains the first and not the second.
    SplitCell {
        threshold: u64,
        modulus: u64,
        inside: u64,
        outside: u64,
        signature: Signature,
    },
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipCertificate::Member { .. })
    }
}

impl AlgebraContext {
    pub fn new(generators: Vec<UpSet>, universe: Universe) -> Self {
        let universe_set = universe.as_set();
        let common_threshold = generators
            .iter()
            .map(UpSet::threshold)
            .chain([universe_set.threshold()])
            .max()
            .unwrap_or(0);
        let common_period = generators.iter().fold(1u64, |p, g| p.lcm(&g.period()));

        let mut groups: BTreeMap<Signature, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
        for n in 0..common_threshold {
            if !universe_set.contains(n) {
                continue;
            }
            let sig = signature(n, &generators);
            groups.entry(sig).or_default().0.push(n);
        }
        if !universe.is_finite() {
            for r in 0..common_period {
                let sig: Signature = generators.iter().map(|g| g.tail_contains(r)).collect();
                groups.entry(sig).or_default().1.push(r);
            }
        }
        let cells = groups
            .into_iter()
            .filter(|(sig, _)| sig.iter().any(|&b| b))
            .map(|(signature, (finite, residues))| Cell {
                signature,
                set: UpSet::from_parts(common_threshold, finite, common_period, residues),
            })
            .filter(|c| !c.set.is_empty())
            .collect();

        AlgebraContext {
            generators,
            universe,
            common_threshold,
            common_period,
            cells,
        }
    }

    pub fn generators(&self) -> &[UpSet] {
        &self.generators
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn common_threshold(&self) -> u64 {
        self.common_threshold
    }

    pub fn common_period(&self) -> u64 {
        self.common_period
    }

    /// Nonempty atoms `∩_{i∈I} Aᵢ ∖ ∪_{j∉I} Aⱼ`, `I ≠ ∅`.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Decide `x ∈ 𝒢⁰`: `x` must differ by a finite set from a union of cells.
    pub fn membership(&self, x: &UpSet) -> MembershipCertificate {
        let universe_set = self.universe.as_set();
        if let Some(v) = x.difference(&universe_set).min_element() {
            return MembershipCertificate::OutsideUniverse { vertex: v };
        }
        let threshold = self.common_threshold.max(x.threshold());
        let modulus = self.common_period.lcm(&x.period());

        // residue classes mod `modulus` past `threshold`, grouped by cell
        let mut by_cell: BTreeMap<Signature, (Option<u64>, Option<u64>)> = BTreeMap::new();
        if !self.universe.is_finite() {
            for r in 0..modulus {
                let sig: Signature = self.generators.iter().map(|g| g.tail_contains(r)).collect();
                let inside = x.tail_contains(r);
                if inside && sig.iter().all(|&b| !b) {
                    return MembershipCertificate::UncoveredTail {
                        threshold,
                        modulus,
                        residue: r,
                    };
                }
                let slot = by_cell.entry(sig).or_default();
                if inside {
                    slot.0.get_or_insert(r);
                } else {
                    slot.1.get_or_insert(r);
                }
            }
        }
        for (sig, slot) in &by_cell {
            if let (Some(inside), Some(outside)) = *slot {
                if sig.iter().any(|&b| b) {
                    return MembershipCertificate::SplitCell {
                        threshold,
                        modulus,
                        inside,
                        outside,
                        signature: sig.clone(),
                    };
                }
            }
        }

        let chosen: Vec<&Cell> = self
            .cells
            .iter()
            .filter(|c| matches!(by_cell.get(&c.signature), Some((Some(_), None))))
            .collect();
        let union = chosen.iter().fold(UpSet::empty(), |acc, c| acc.union(&c.set));
        let added = x.difference(&union);
        let removed = union.difference(x);
        debug_assert!(added.is_finite() && removed.is_finite());
        MembershipCertificate::Member {
            cells: chosen.iter().map(|c| c.signature.clone()).collect(),
            union,
            added,
            removed,
        }
    }

    pub fn in_generated_algebra(&self, x: &UpSet) -> bool {
        self.membership(x).is_member()
    }

    /// `G⁰ ∈ 𝒢⁰`, the unitality criterion.
    pub fn whole_vertex_set_in_g0(&self) -> MembershipCertificate {
        self.membership(&self.universe.as_set())
    }
}

pub fn signature(v: Vertex, sets: &[UpSet]) -> Signature {
    sets.iter().map(|x| x.contains(v)).collect()
}

/// The set of points whose signature against `sets` equals `sig`.
pub fn signature_class(sig: &[bool], sets: &[UpSet]) -> UpSet {
    sets.iter().zip(sig).fold(UpSet::all(), |acc, (x, &inside)| {
        if inside {
            acc.intersection(x)
        } else {
            acc.difference(x)
        }
    })
}

/// Largest threshold among `sets`: past it every set is purely periodic.
pub fn exception_bound(sets: &[UpSet]) -> u64 {
    sets.iter().map(UpSet::threshold).max().unwrap_or(0)
}

/// Two vertices `s ∈ A∩S`, `t ∈ A∖S` that no set of `xs` separates.
///
/// Returns the lexicographically smallest such pair.
pub fn indistinguishable_pair(
    ctx: &AlgebraContext,
    xs: &[UpSet],
    s: &UpSet,
    a: &UpSet,
) -> Result<(Vertex, Vertex), Error> {
    indistinguishable_pair_from(ctx, xs, s, a, 0)
}

/// As [`indistinguishable_pair`], restricted to vertices `≥ lower`.
pub fn indistinguishable_pair_from(
    ctx: &AlgebraContext,
    xs: &[UpSet],
    s: &UpSet,
    a: &UpSet,
    lower: u64,
) -> Result<(Vertex, Vertex), Error> {
    let mut failed = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        if !ctx.in_generated_algebra(x) {
            failed.push(LemmaPrecondition::SetNotGeneralized { index: i });
        }
    }
    if !ctx.in_generated_algebra(a) {
        failed.push(LemmaPrecondition::AmbientNotGeneralized);
    }
    let inside = a.intersection(s);
    let outside = a.difference(s);
    if inside.is_finite() {
        failed.push(LemmaPrecondition::IntersectionFinite);
    }
    if outside.is_finite() {
        failed.push(LemmaPrecondition::DifferenceFinite);
    }
    if ctx.in_generated_algebra(&inside) {
        failed.push(LemmaPrecondition::IntersectionGeneralized);
    }
    if !failed.is_empty() {
        return Err(Error::PreconditionViolated(failed));
    }

    let window = UpSet::cofinite(0..lower);
    let inside = inside.intersection(&window);
    let outside = outside.intersection(&window);
    let bound = xs
        .iter()
        .chain([&inside, &outside])
        .map(UpSet::threshold)
        .max()
        .unwrap_or(0);
    let modulus = xs
        .iter()
        .chain([&inside, &outside])
        .fold(1u64, |p, x| p.lcm(&x.period()));
    // past `bound`, candidates repeat with period `modulus`
    for sv in inside.iter().take_while(|&n| n < bound + modulus) {
        let class = signature_class(&signature(sv, xs), xs);
        if let Some(t) = class.intersection(&outside).min_element() {
            return Ok((sv, t));
        }
    }
    Err(Error::Internal(
        "no indistinguishable pair exists although every precondition holds".into(),
    ))
}
