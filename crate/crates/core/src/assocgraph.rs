//! The graph `E` associated with an ultragraph through words over the edge
//! enumeration.
//!
//! Bar edges out of a word `ω` land on the vertices of `σ⁻¹(ω)`, which can be
//! infinite, so that family is stored as a set rather than edge by edge.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::paths;
use crate::setalg::{Cardinality, Universe, UpSet, Vertex};
use crate::ultragraph::{Edge, Ultragraph};

/// A nonzero 0/1 word; bit `i` refers to the edge `e_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<bool>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&self, bit: bool) -> Word {
        let mut w = self.0.clone();
        w.push(bit);
        Word(w)
    }

    pub fn restrict(&self, m: usize) -> Word {
        Word(self.0[..m].to_vec())
    }

    pub fn last(&self) -> bool {
        *self.0.last().expect("words are nonempty")
    }

    /// `0…01`.
    pub fn is_gamma0(&self) -> bool {
        self.last() && self.0[..self.len() - 1].iter().all(|b| !b)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    /// The word of `v` over the first `n` edges.
    pub fn characteristic(g: &Ultragraph, v: Vertex, n: usize) -> Word {
        Word(g.edges[..n].iter().map(|e| e.range.contains(v)).collect())
    }

    /// `r(ω) = ∩_{ωᵢ=1} r(eᵢ) ∖ ∪_{ωᵢ=0} r(eᵢ)`.
    pub fn range(&self, g: &Ultragraph) -> UpSet {
        assert!(!self.is_zero(), "the zero word has no range");
        let mut acc: Option<UpSet> = None;
        for (b, e) in self.0.iter().zip(&g.edges) {
            if *b {
                acc = Some(match acc {
                    None => e.range.clone(),
                    Some(a) => a.intersection(&e.range),
                });
            }
        }
        let mut acc = acc.unwrap();
        for (b, e) in self.0.iter().zip(&g.edges) {
            if !*b {
                acc = acc.difference(&e.range);
            }
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, ")")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum EVertex {
    Vertex(Vertex),
    Word(Word),
}

impl fmt::Display for EVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EVertex::Vertex(v) => write!(f, "{v}"),
            EVertex::Word(w) => write!(f, "{w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaStructure {
    /// `delta[n-1] = Δₙ`, sorted.
    pub delta: Vec<Vec<Word>>,
    pub gamma0: Vec<Word>,
    pub gamma_plus: Vec<Word>,
    pub w_plus: UpSet,
    pub w_infinity: UpSet,
    /// `r(ω)` for `ω ∈ Δ`.
    pub ranges: BTreeMap<Word, UpSet>,
    /// `σ⁻¹(ω)` for `ω ∈ Δ`.
    pub sigma_inverse: BTreeMap<Word, UpSet>,
}

impl DeltaStructure {
    pub fn is_empty(&self) -> bool {
        self.delta.iter().all(Vec::is_empty)
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.delta.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, w: &Word) -> bool {
        !w.is_empty() && w.len() <= self.delta.len() && self.delta[w.len() - 1].binary_search(w).is_ok()
    }

    /// The longest word of `Δ` whose range holds `v`.
    pub fn sigma(&self, v: Vertex) -> Option<&Word> {
        self.sigma_inverse.iter().find(|(_, s)| s.contains(v)).map(|(w, _)| w)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

pub fn compute_delta(g: &Ultragraph) -> Result<DeltaStructure, Error> {
    let n_edges = g.edges.len();
    let mut delta: Vec<Vec<Word>> = Vec::with_capacity(n_edges);
    let mut ranges = BTreeMap::new();
    for n in 1..=n_edges {
        // a word of length n with infinite range has a prefix with infinite
        // range, unless the prefix is zero
        let mut candidates = vec![Word([vec![false; n - 1], vec![true]].concat())];
        if n > 1 {
            for w in &delta[n - 2] {
                candidates.push(w.extend(false));
                candidates.push(w.extend(true));
            }
        }
        let mut level = Vec::new();
        for w in candidates {
            let r = w.range(g);
            if !r.is_finite() {
                ranges.insert(w.clone(), r);
                level.push(w);
            }
        }
        level.sort();
        level.dedup();
        delta.push(level);
    }

    let all: Vec<&Word> = delta.iter().flatten().collect();
    let gamma0 = all.iter().filter(|w| w.is_gamma0()).map(|w| (*w).clone()).collect();
    let gamma_plus = all.iter().filter(|w| !w.is_gamma0()).map(|w| (*w).clone()).collect();
    let w_plus = ranges.values().fold(UpSet::empty(), |a, r| a.union(r));

    // with finitely many words no vertex lies in infinitely many ranges
    let w_infinity = UpSet::empty();
    if !w_infinity.is_empty() {
        return Err(Error::Internal(
            "W∞ is nonempty; σ on W∞ needs an enumeration of W∞".into(),
        ));
    }

    let mut sigma_inverse = BTreeMap::new();
    for w in &all {
        let n = w.len();
        let mut s = ranges[*w].clone();
        if n < n_edges {
            for b in [false, true] {
                if let Some(r) = ranges.get(&w.extend(b)) {
                    s = s.difference(r);
                }
            }
        }
        sigma_inverse.insert((*w).clone(), s);
    }

    Ok(DeltaStructure {
        delta,
        gamma0,
        gamma_plus,
        w_plus,
        w_infinity,
        ranges,
        sigma_inverse,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssocGraph {
    pub graph: Ultragraph,
    pub delta: DeltaStructure,
    /// `x_sets[n-1] = X(eₙ)`.
    pub x_sets: Vec<Vec<EVertex>>,
}

pub fn build_assoc_graph(g: &Ultragraph) -> Result<AssocGraph, Error> {
    let delta = compute_delta(g)?;
    let mut x_sets = Vec::with_capacity(g.edges.len());
    for (i, e) in g.edges.iter().enumerate() {
        let n = i + 1;
        let ending_in_one: Vec<&Word> = delta.delta[i].iter().filter(|w| w.last()).collect();
        let vertices = ending_in_one
            .iter()
            .fold(e.range.clone(), |acc, w| acc.difference(&delta.ranges[*w]));
        if !vertices.is_finite() {
            return Err(Error::Internal(format!("X(e{n}) is infinite")));
        }
        let mut x: Vec<EVertex> = vertices.iter().map(EVertex::Vertex).collect();
        x.extend(ending_in_one.into_iter().map(|w| EVertex::Word(w.clone())));
        x_sets.push(x);
    }
    Ok(AssocGraph {
        graph: g.clone(),
        delta,
        x_sets,
    })
}

impl AssocGraph {
    /// Pair edges `(eₙ, x)` as `(n - 1, x)`.
    pub fn pair_edges(&self) -> impl Iterator<Item = (usize, &EVertex)> {
        self.x_sets
            .iter()
            .enumerate()
            .flat_map(|(i, xs)| xs.iter().map(move |x| (i, x)))
    }

    /// `ω̄ : ω|_{|ω|-1} → ω` for `ω ∈ Γ₊`.
    pub fn bar_word_edges(&self) -> impl Iterator<Item = (Word, &Word)> {
        self.delta.gamma_plus.iter().map(|w| (w.restrict(w.len() - 1), w))
    }

    pub fn out_degree(&self, x: &EVertex) -> Cardinality {
        match x {
            EVertex::Vertex(v) => {
                Cardinality::Finite(self.graph.out_edges(*v).map(|i| self.x_sets[i].len() as u64).sum())
            }
            EVertex::Word(w) => {
                let words = self.bar_word_edges().filter(|(src, _)| src == w).count() as u64;
                match self.delta.sigma_inverse.get(w).map(UpSet::cardinality) {
                    Some(Cardinality::Infinite) => Cardinality::Infinite,
                    Some(Cardinality::Finite(k)) => Cardinality::Finite(k + words),
                    None => Cardinality::Finite(words),
                }
            }
        }
    }

    pub fn is_regular(&self, x: &EVertex) -> bool {
        matches!(self.out_degree(x), Cardinality::Finite(k) if k > 0)
    }

    /// Vertices of `E` (words included) with infinitely many outgoing edges.
    pub fn infinite_emitters(&self) -> Vec<Word> {
        self.delta
            .words()
            .filter(|w| self.out_degree(&EVertex::Word((*w).clone())) == Cardinality::Infinite)
            .cloned()
            .collect()
    }

    pub fn is_row_finite(&self) -> bool {
        self.infinite_emitters().is_empty()
    }

    /// G-vertices that emit nothing in `E`.
    pub fn vertex_sinks(&self) -> UpSet {
        let emitting = UpSet::finite(
            self.graph
                .edges
                .iter()
                .zip(&self.x_sets)
                .filter(|(_, x)| !x.is_empty())
                .map(|(e, _)| e.source),
        );
        self.graph.universe.as_set().difference(&emitting)
    }

    pub fn word_sinks(&self) -> Vec<Word> {
        self.delta
            .words()
            .filter(|w| self.out_degree(&EVertex::Word((*w).clone())) == Cardinality::Finite(0))
            .cloned()
            .collect()
    }

    pub fn has_sink(&self) -> bool {
        !self.vertex_sinks().is_empty() || !self.word_sinks().is_empty()
    }

    /// True when `Δ = ∅`, so `E` is the edge splitting of the ultragraph.
    pub fn is_edge_splitting(&self) -> bool {
        self.delta.is_empty()
    }

    /// `E` as an ultragraph with singleton ranges. Words are numbered
    /// `0..|Δ|` in order and G-vertices are shifted by `|Δ|`. Needs every
    /// vertex of `E` to emit finitely many edges.
    pub fn to_graph(&self) -> Option<(Ultragraph, Vec<Word>)> {
        if !self.is_row_finite() {
            return None;
        }
        let words: Vec<Word> = self.delta.words().cloned().collect();
        let shift = words.len() as u64;
        let index = |x: &EVertex| -> Vertex {
            match x {
                EVertex::Vertex(v) => v + shift,
                EVertex::Word(w) => words.iter().position(|u| u == w).unwrap() as u64,
            }
        };
        let mut edges = Vec::new();
        for (i, x) in self.pair_edges() {
            let e = &self.graph.edges[i];
            edges.push(Edge::new(
                format!("{}@{}", e.id, x),
                e.source + shift,
                UpSet::singleton(index(x)),
            ));
        }
        for (w, s) in &self.delta.sigma_inverse {
            for v in s.iter() {
                edges.push(Edge::new(
                    format!("bar{v}"),
                    index(&EVertex::Word(w.clone())),
                    UpSet::singleton(v + shift),
                ));
            }
        }
        for (src, w) in self.bar_word_edges() {
            edges.push(Edge::new(
                format!("bar{w}"),
                index(&EVertex::Word(src)),
                UpSet::singleton(index(&EVertex::Word(w.clone()))),
            ));
        }
        let universe = match self.graph.universe {
            Universe::Finite(m) => Universe::Finite(m + shift),
            Universe::CountablyInfinite => Universe::CountablyInfinite,
        };
        Some((Ultragraph::new(universe, edges), words))
    }

    /// DOT rendering of vertices below `window`, all words, and every edge
    /// between them. Bar families reaching past the window are summarized.
    pub fn to_dot(&self, window: u64) -> String {
        let mut out = String::from("digraph E {\n");
        let in_window = |v: Vertex| v < window && self.graph.universe.contains(v);
        for v in (0..window).filter(|&v| self.graph.universe.contains(v)) {
            writeln!(out, "  \"{v}\";").unwrap();
        }
        for w in self.delta.words() {
            writeln!(out, "  \"{w}\" [shape=box];").unwrap();
        }
        for (i, x) in self.pair_edges() {
            let e = &self.graph.edges[i];
            if !in_window(e.source) {
                continue;
            }
            if let EVertex::Vertex(v) = x {
                if !in_window(*v) {
                    continue;
                }
            }
            writeln!(out, "  \"{}\" -> \"{}\" [label=\"({},{})\"];", e.source, x, e.id, x).unwrap();
        }
        for (src, w) in self.bar_word_edges() {
            writeln!(out, "  \"{src}\" -> \"{w}\" [label=\"bar\"];").unwrap();
        }
        for (w, s) in &self.delta.sigma_inverse {
            for v in s.iter().take_while(|&v| v < window) {
                writeln!(out, "  \"{w}\" -> \"{v}\" [label=\"bar\"];").unwrap();
            }
            let beyond = s.difference(&UpSet::prefix(window));
            if !beyond.is_empty() {
                writeln!(
                    out,
                    "  \"{w} more\" [shape=note, label=\"bars to σ⁻¹ = {s}\"];\n  \"{w}\" -> \"{w} more\" [style=dashed];"
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Ultragraph,
    Assoc,
}

/// Path counts indexed by ultragraph length.
///
/// On the ultragraph side these are paths from `v` whose range contains `w`.
/// On the `E` side they are paths `v → w`, where length counts pair edges
/// only; bar edges just carry a path down to its next vertex.
pub fn count_paths(e: &AssocGraph, side: Side, v: Vertex, w: Vertex, max_len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_len + 1];
    match side {
        Side::Ultragraph => {
            for p in paths::enumerate_paths(&e.graph, v, max_len) {
                if p.range(&e.graph).contains(w) {
                    counts[p.len()] += 1;
                }
            }
        }
        Side::Assoc => {
            let emitters = e.graph.emitters().union(&UpSet::singleton(w));
            count_e(e, &EVertex::Vertex(v), w, 0, max_len, &emitters, &mut counts);
        }
    }
    counts
}

fn count_e(e: &AssocGraph, at: &EVertex, w: Vertex, pairs: usize, max_len: usize, useful: &UpSet, counts: &mut [u64]) {
    match at {
        EVertex::Vertex(u) => {
            if *u == w {
                counts[pairs] += 1;
            }
            if pairs == max_len {
                return;
            }
            for i in e.graph.out_edges(*u) {
                for x in &e.x_sets[i] {
                    count_e(e, x, w, pairs + 1, max_len, useful, counts);
                }
            }
        }
        EVertex::Word(word) => {
            // bar edges into vertices that neither are `w` nor emit lead nowhere
            if let Some(s) = e.delta.sigma_inverse.get(word) {
                for u in s.intersection(useful).iter() {
                    count_e(e, &EVertex::Vertex(u), w, pairs, max_len, useful, counts);
                }
            }
            for (src, next) in e.bar_word_edges() {
                if &src == word {
                    count_e(e, &EVertex::Word(next.clone()), w, pairs, max_len, useful, counts);
                }
            }
        }
    }
}

/// Raw `E`-path counts by number of edges, bar edges included.
pub fn count_e_paths_raw(e: &AssocGraph, v: Vertex, w: Vertex, max_len: usize) -> Option<Vec<u64>> {
    let (graph, words) = e.to_graph()?;
    let shift = words.len() as u64;
    let mut counts = vec![0u64; max_len + 1];
    for p in paths::enumerate_paths(&graph, v + shift, max_len) {
        if p.range(&graph).contains(w + shift) {
            counts[p.len()] += 1;
        }
    }
    Some(counts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub left: bool,
    pub right: bool,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LemmaCheck {
    fn new(name: &'static str, statement: &'static str, left: bool, right: bool) -> Self {
        LemmaCheck {
            name,
            statement,
            left,
            right,
            agree: left == right,
            note: None,
        }
    }
}

/// Row-finite, no-exit, and every infinite path ends in a sink or a cycle.
pub fn strong_condition(g: &Ultragraph) -> bool {
    g.is_row_finite() && paths::is_no_exit(g) && paths::infinite_paths_end_in_sink_or_cycle(g)
}

/// Evaluate both sides of each biconditional relating the ultragraph and `E`.
pub fn check_lemmas(e: &AssocGraph) -> Vec<LemmaCheck> {
    let g = &e.graph;
    let no_infinite_emitters =
        (0..g.window_bound()).all(|v| !g.universe.contains(v) || !g.classify_vertex(v).unwrap().is_infinite_emitter);
    let mut out = Vec::new();

    let mut c = LemmaCheck::new(
        "row_finite_i",
        "E is row-finite iff the ultragraph has no infinite emitters",
        e.is_row_finite(),
        no_infinite_emitters,
    );
    if !c.agree {
        let words: Vec<String> = e.infinite_emitters().iter().map(ToString::to_string).collect();
        c.note = Some(format!(
            "words with infinite σ⁻¹ emit infinitely many bar edges: {}",
            words.join(", ")
        ));
    }
    out.push(c);

    let g_sinks = !g.sink_set().is_empty();
    out.push(LemmaCheck::new(
        "row_finite_ii",
        "E has no sinks iff the ultragraph has no sinks",
        !e.has_sink(),
        !g_sinks,
    ));

    out.push(LemmaCheck::new(
        "delta_empty_row_finite",
        "every range is finite iff Δ is empty",
        g.edges.iter().all(|x| x.range.is_finite()),
        e.delta.is_empty(),
    ));

    out.push(LemmaCheck::new(
        "str_row_finite_equiv",
        "the ultragraph is row-finite iff E is row-finite and Δ is empty",
        g.is_row_finite(),
        e.is_row_finite() && e.delta.is_empty(),
    ));

    let e_side = match e.to_graph() {
        Some((eg, _)) => strong_condition(&eg),
        None => false,
    };
    out.push(LemmaCheck::new(
        "inf_path",
        "E is row-finite, no-exit, with every infinite path ending in a sink or cycle iff the ultragraph is",
        e_side,
        strong_condition(g),
    ));
    out
}
