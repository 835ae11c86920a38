//! Finite paths, cycles, exits, and the infinite-path conditions.
//!
//! Edges are referred to by their index in the enumeration; ids appear only
//! when rendering.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::setalg::{Cardinality, UpSet, Vertex};
use crate::ultragraph::Ultragraph;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    Trivial(Vertex),
    Edges(Vec<usize>),
}

impl Path {
    pub fn len(&self) -> usize {
        match self {
            Path::Trivial(_) => 0,
            Path::Edges(es) => es.len(),
        }
    }

    /// Same as [`Path::is_trivial`]: a path is empty when it has no edges.
    pub fn is_empty(&self) -> bool {
        self.is_trivial()
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Path::Trivial(_))
    }

    pub fn edges(&self) -> &[usize] {
        match self {
            Path::Trivial(_) => &[],
            Path::Edges(es) => es,
        }
    }

    pub fn source(&self, g: &Ultragraph) -> Vertex {
        match self {
            Path::Trivial(v) => *v,
            Path::Edges(es) => g.edges[es[0]].source,
        }
    }

    /// `r(α) = r(α_k)`, and `{v}` for the trivial path at `v`.
    pub fn range(&self, g: &Ultragraph) -> UpSet {
        match self {
            Path::Trivial(v) => UpSet::singleton(*v),
            Path::Edges(es) => g.edges[*es.last().unwrap()].range.clone(),
        }
    }

    pub fn is_valid(&self, g: &Ultragraph) -> bool {
        match self {
            Path::Trivial(v) => g.universe.contains(*v),
            Path::Edges(es) => {
                !es.is_empty()
                    && es.iter().all(|&i| i < g.edges.len())
                    && es
                        .windows(2)
                        .all(|w| g.edges[w[0]].range.contains(g.edges[w[1]].source))
            }
        }
    }

    pub fn is_closed(&self, g: &Ultragraph) -> bool {
        !self.is_trivial() && self.range(g).contains(self.source(g))
    }

    pub fn is_cycle(&self, g: &Ultragraph) -> bool {
        let sources: BTreeSet<Vertex> = self.edges().iter().map(|&i| g.edges[i].source).collect();
        self.is_valid(g) && self.is_closed(g) && sources.len() == self.len()
    }

    pub fn display<'a>(&'a self, g: &'a Ultragraph) -> PathDisplay<'a> {
        PathDisplay { path: self, g }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    g: &'a Ultragraph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.path {
            Path::Trivial(v) => write!(f, "{v}"),
            Path::Edges(es) => {
                let ids: Vec<&str> = es.iter().map(|&i| self.g.edges[i].id.as_str()).collect();
                write!(f, "{}", ids.join("·"))
            }
        }
    }
}

/// All paths out of `from` of length at most `max_len`, in depth-first
/// preorder with extensions tried in enumeration order.
pub fn enumerate_paths(g: &Ultragraph, from: Vertex, max_len: usize) -> Vec<Path> {
    let mut out = vec![Path::Trivial(from)];
    let mut stack = Vec::new();
    fn extend(g: &Ultragraph, stack: &mut Vec<usize>, max_len: usize, out: &mut Vec<Path>) {
        if stack.len() == max_len {
            return;
        }
        let last = &g.edges[*stack.last().unwrap()].range;
        for (j, f) in g.edges.iter().enumerate() {
            if last.contains(f.source) {
                stack.push(j);
                out.push(Path::Edges(stack.clone()));
                extend(g, stack, max_len, out);
                stack.pop();
            }
        }
    }
    if max_len > 0 {
        for i in g.out_edges(from).collect::<Vec<_>>() {
            stack.push(i);
            out.push(Path::Edges(stack.clone()));
            extend(g, &mut stack, max_len, &mut out);
            stack.pop();
        }
    }
    out
}

/// Every cycle once, as its rotation starting at the least edge index.
pub fn find_cycles(g: &Ultragraph) -> Vec<Path> {
    let mut out = Vec::new();
    for start in 0..g.edges.len() {
        let mut stack = vec![start];
        let mut used = BTreeSet::from([g.edges[start].source]);
        cycle_search(g, start, &mut stack, &mut used, &mut out);
    }
    out.sort();
    out
}

fn cycle_search(
    g: &Ultragraph,
    start: usize,
    stack: &mut Vec<usize>,
    used: &mut BTreeSet<Vertex>,
    out: &mut Vec<Path>,
) {
    let last = &g.edges[*stack.last().unwrap()].range;
    if last.contains(g.edges[start].source) {
        out.push(Path::Edges(stack.clone()));
    }
    for j in start + 1..g.edges.len() {
        let f = &g.edges[j];
        if last.contains(f.source) && !used.contains(&f.source) {
            stack.push(j);
            used.insert(f.source);
            cycle_search(g, start, stack, used, out);
            used.remove(&f.source);
            stack.pop();
        }
    }
}

/// Exit positions are 1-based, matching `αᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitWitness {
    Edge { edge: usize, index: usize },
    Sink { sinks: UpSet, index: usize },
}

impl ExitWitness {
    pub fn index(&self) -> usize {
        match self {
            ExitWitness::Edge { index, .. } | ExitWitness::Sink { index, .. } => *index,
        }
    }
}

/// All exits of `p`. A closed path is read cyclically, so the edge after its
/// last edge is its first; an open path has no successor at its last edge.
pub fn exits_of(g: &Ultragraph, p: &Path) -> Vec<ExitWitness> {
    let es = p.edges();
    let closed = p.is_closed(g);
    let sinks = g.sink_set();
    let mut out = Vec::new();
    for (i, &a) in es.iter().enumerate() {
        let range = &g.edges[a].range;
        let next = if i + 1 < es.len() {
            Some(es[i + 1])
        } else if closed {
            Some(es[0])
        } else {
            None
        };
        for (j, e) in g.edges.iter().enumerate() {
            if range.contains(e.source) && Some(j) != next {
                out.push(ExitWitness::Edge { edge: j, index: i + 1 });
            }
        }
        let hit = range.intersection(&sinks);
        if !hit.is_empty() {
            out.push(ExitWitness::Sink {
                sinks: hit,
                index: i + 1,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoExitWitness {
    pub cycle: Path,
    pub exit: ExitWitness,
}

/// `|s⁻¹(s(αᵢ))| = |r(αᵢ)| = 1` along every cycle.
pub fn no_exit_witness(g: &Ultragraph) -> Option<NoExitWitness> {
    for c in find_cycles(g) {
        let ok = c.edges().iter().all(|&i| {
            let e = &g.edges[i];
            g.out_degree(e.source) == 1 && e.range.cardinality() == Cardinality::Finite(1)
        });
        if !ok {
            let exit = exits_of(g, &c)
                .into_iter()
                .next()
                .expect("a cycle failing the degree condition has an exit");
            return Some(NoExitWitness { cycle: c, exit });
        }
    }
    None
}

pub fn is_no_exit(g: &Ultragraph) -> bool {
    no_exit_witness(g).is_none()
}

/// Nodes are edge indices, with an arc `e → f` iff `s(f) ∈ r(e)`.
pub fn edge_transition_graph(g: &Ultragraph) -> DiGraph<usize, ()> {
    let mut t = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..g.edges.len()).map(|i| t.add_node(i)).collect();
    for (i, e) in g.edges.iter().enumerate() {
        for (j, f) in g.edges.iter().enumerate() {
            if e.range.contains(f.source) {
                t.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    t
}

/// Two distinct ways to leave `node` and come back inside one strongly
/// connected component of the transition graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchingWitness {
    pub node: usize,
    pub successors: (usize, usize),
    pub walks: (Vec<usize>, Vec<usize>),
}

pub const INFINITE_PATH_JUSTIFICATION: &str = "finitely many edges: every infinite path \
revisits some edge, its tail stays in one strongly connected component of the edge \
transition graph, and a component in which each edge has a single successor is a simple \
cycle whose edges have distinct sources, so the tail is γ^∞ for a cycle γ; infinite sinks \
need infinitely many edges and cannot occur";

pub fn infinite_path_witness(g: &Ultragraph) -> Option<BranchingWitness> {
    let t = edge_transition_graph(g);
    for scc in tarjan_scc(&t) {
        let members: BTreeSet<usize> = scc.iter().map(|n| t[*n]).collect();
        let nontrivial = members.len() > 1 || {
            let n = scc[0];
            t.contains_edge(n, n)
        };
        if !nontrivial {
            continue;
        }
        for &e in &members {
            let succ: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&f| g.edges[e].range.contains(g.edges[f].source))
                .collect();
            if succ.len() >= 2 {
                let walk = |f: usize| {
                    let mut w = vec![e];
                    w.extend(shortest_walk(g, &members, f, e));
                    w
                };
                return Some(BranchingWitness {
                    node: e,
                    successors: (succ[0], succ[1]),
                    walks: (walk(succ[0]), walk(succ[1])),
                });
            }
        }
    }
    None
}

/// Shortest transition walk `from → … → to` inside `within`, both ends included.
fn shortest_walk(g: &Ultragraph, within: &BTreeSet<usize>, from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; g.edges.len()];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in within {
            if prev[y] == usize::MAX && g.edges[x].range.contains(g.edges[y].source) {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut walk = vec![to];
    let mut x = to;
    while x != from {
        x = prev[x];
        walk.push(x);
    }
    walk.reverse();
    walk
}

pub fn infinite_paths_end_in_sink_or_cycle(g: &Ultragraph) -> bool {
    infinite_path_witness(g).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    IsolatedLoop,
    AcyclicRowFiniteSinks,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub edges: Vec<usize>,
    pub vertices: UpSet,
    pub kind: ComponentKind,
}

/// Vertices touched by no edge; each is its own (acyclic, row-finite) component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub vertices: UpSet,
    pub count: Cardinality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub residual: Residual,
    /// Acyclic components with finitely many edges have no infinite paths.
    pub infinite_path_clause: &'static str,
}

pub fn decompose_components(g: &Ultragraph) -> Decomposition {
    let n = g.edges.len();
    let touched: Vec<UpSet> = g
        .edges
        .iter()
        .map(|e| e.range.union(&UpSet::singleton(e.source)))
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if !touched[i].is_disjoint(&touched[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }

    let mut covered = UpSet::empty();
    let components = groups
        .into_iter()
        .map(|edges| {
            let vertices = edges.iter().fold(UpSet::empty(), |acc, &i| acc.union(&touched[i]));
            covered = covered.union(&vertices);
            let sub = Ultragraph::new(g.universe, edges.iter().map(|&i| g.edges[i].clone()).collect());
            let kind = if edges.len() == 1 && {
                let e = &g.edges[edges[0]];
                e.range == UpSet::singleton(e.source)
            } {
                ComponentKind::IsolatedLoop
            } else if find_cycles(&sub).is_empty() && sub.is_row_finite() {
                ComponentKind::AcyclicRowFiniteSinks
            } else {
                ComponentKind::Other
            };
            Component { edges, vertices, kind }
        })
        .collect();
    let rest = g.universe.as_set().difference(&covered);
    Decomposition {
        components,
        residual: Residual {
            count: rest.cardinality(),
            vertices: rest,
        },
        infinite_path_clause: "vacuous: finitely many edges and no cycles leave no infinite paths",
    }
}
