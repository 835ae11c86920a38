//! Ultragraphs with finitely many edges over a vertex universe of naturals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::setalg::{AlgebraContext, Universe, UpSet, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: Vertex,
    pub range: UpSet,
}

impl Edge {
    pub fn new(id: impl Into<String>, source: Vertex, range: UpSet) -> Self {
        Edge {
            id: id.into(),
            source,
            range,
        }
    }
}

/// Edge order is the enumeration `e₁, e₂, …` used by the associated graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ultragraph {
    pub universe: Universe,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyRange { edge: String },
    SourceOutsideUniverse { edge: String, source: Vertex },
    RangeOutsideUniverse { edge: String, vertex: Vertex },
    DuplicateId { edge: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyRange { edge } => write!(f, "edge {edge}: empty range"),
            Violation::SourceOutsideUniverse { edge, source } => {
                write!(f, "edge {edge}: source {source} is outside the universe")
            }
            Violation::RangeOutsideUniverse { edge, vertex } => {
                write!(f, "edge {edge}: range vertex {vertex} is outside the universe")
            }
            Violation::DuplicateId { edge } => write!(f, "duplicate edge id {edge}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClassification {
    pub is_sink: bool,
    pub is_source: bool,
    pub is_infinite_emitter: bool,
    pub is_regular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowFiniteWitness {
    InfiniteRange { edge: String },
}

impl Ultragraph {
    pub fn new(universe: Universe, edges: Vec<Edge>) -> Self {
        Ultragraph { universe, edges }
    }

    /// Build and reject anything `validate` complains about.
    pub fn checked(universe: Universe, edges: Vec<Edge>) -> Result<Self, Error> {
        let g = Ultragraph::new(universe, edges);
        match g.validate() {
            Ok(()) => Ok(g),
            Err(v) => Err(Error::InvalidInput(
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            )),
        }
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let universe = self.universe.as_set();
        for e in &self.edges {
            if !seen.insert(e.id.as_str()) {
                out.push(Violation::DuplicateId { edge: e.id.clone() });
            }
            if e.range.is_empty() {
                out.push(Violation::EmptyRange { edge: e.id.clone() });
            }
            if !self.universe.contains(e.source) {
                out.push(Violation::SourceOutsideUniverse {
                    edge: e.id.clone(),
                    source: e.source,
                });
            }
            if let Some(v) = e.range.difference(&universe).min_element() {
                out.push(Violation::RangeOutsideUniverse {
                    edge: e.id.clone(),
                    vertex: v,
                });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// `s⁻¹(v)` as edge indices.
    pub fn out_edges(&self, v: Vertex) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == v)
            .map(|(i, _)| i)
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out_edges(v).count()
    }

    pub fn emitters(&self) -> UpSet {
        UpSet::finite(self.edges.iter().map(|e| e.source))
    }

    pub fn ranges(&self) -> Vec<UpSet> {
        self.edges.iter().map(|e| e.range.clone()).collect()
    }

    pub fn algebra_context(&self) -> AlgebraContext {
        AlgebraContext::new(self.ranges(), self.universe)
    }

    /// Finite universe and finite edge set.
    pub fn is_finite(&self) -> bool {
        self.universe.is_finite()
    }

    pub fn classify_vertex(&self, v: Vertex) -> Result<VertexClassification, Error> {
        if !self.universe.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        let is_sink = self.out_degree(v) == 0;
        let is_source = self.edges.iter().all(|e| !e.range.contains(v));
        // finitely many edges: no vertex emits infinitely many
        let is_infinite_emitter = false;
        Ok(VertexClassification {
            is_sink,
            is_source,
            is_infinite_emitter,
            is_regular: !is_sink && !is_infinite_emitter,
        })
    }

    pub fn sink_set(&self) -> UpSet {
        self.universe.as_set().difference(&self.emitters())
    }

    pub fn source_set(&self) -> UpSet {
        let covered = self.edges.iter().fold(UpSet::empty(), |acc, e| acc.union(&e.range));
        self.universe.as_set().difference(&covered)
    }

    /// Vertices that are neither sinks nor infinite emitters.
    pub fn regular_set(&self) -> UpSet {
        self.emitters().intersection(&self.universe.as_set())
    }

    pub fn row_finite_witness(&self) -> Option<RowFiniteWitness> {
        self.edges
            .iter()
            .find(|e| !e.range.is_finite())
            .map(|e| RowFiniteWitness::InfiniteRange { edge: e.id.clone() })
    }

    pub fn is_row_finite(&self) -> bool {
        self.row_finite_witness().is_none()
    }

    /// A bound past which every range is purely periodic, padded by a few periods.
    pub fn window_bound(&self) -> u64 {
        let mut sets = self.ranges();
        sets.push(self.universe.as_set());
        let t = sets.iter().map(UpSet::threshold).max().unwrap_or(0);
        let p = sets.iter().fold(1u64, |p, s| num_integer::lcm(p, s.period()));
        let s = self.edges.iter().map(|e| e.source + 1).max().unwrap_or(0);
        t.max(s) + 3 * p
    }
}
