//! The path-pair representation of `L_K(𝒢)` for finite acyclic ultragraphs.
//!
//! For each sink `w` the pairs `(α, w)` with `w ∈ r(α)` (and `(w, w)`) index
//! a block `M_{n_w}(K)`. `s_e` prepends `e`, `p_A` keeps pairs whose path
//! starts in `A`, and `s_e*` is the transpose of `s_e`.

use std::collections::HashMap;

use serde::Serialize;

use crate::classifier::{FieldDescriptor, RingDescriptor};
use crate::error::Error;
use crate::paths::{self, Path};
use crate::setalg::{Universe, UpSet, Vertex};
use crate::ultragraph::Ultragraph;

use super::algebra::{BlockShape, Element, GeneratorKind, Matrix, MatrixAlgebra, Side, Subspace};
use super::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairBlock {
    pub sink: Vertex,
    /// `(w, w)` first, then by length and edge indices.
    pub paths: Vec<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathPairBasis {
    pub blocks: Vec<PairBlock>,
}

impl PathPairBasis {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.paths.len()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Representation {
    pub graph: Ultragraph,
    pub basis: PathPairBasis,
    pub algebra: MatrixAlgebra,
    index: Vec<HashMap<Path, usize>>,
}

/// Rejects anything that is not a valid ultragraph with finite universe and
/// no cycles.
pub fn check_finite_acyclic(g: &Ultragraph) -> Result<(), Error> {
    if let Err(v) = g.validate() {
        return Err(Error::InvalidInput(
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        ));
    }
    if !g.universe.is_finite() {
        return Err(Error::NotFiniteAcyclic("the vertex set is infinite".into()));
    }
    if let Some(c) = paths::find_cycles(g).first() {
        return Err(Error::NotFiniteAcyclic(format!("cycle {}", c.display(g))));
    }
    Ok(())
}

pub fn build_representation(g: &Ultragraph, field: FieldDescriptor) -> Result<Representation, Error> {
    check_finite_acyclic(g)?;
    let Universe::Finite(m) = g.universe else {
        unreachable!()
    };
    // acyclic: sources along a path are distinct, so length ≤ |edges|
    let mut all_paths: Vec<Path> = (0..m)
        .flat_map(|v| paths::enumerate_paths(g, v, g.edges.len()))
        .filter(|p| !p.is_trivial())
        .collect();
    all_paths.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.edges().cmp(b.edges())));

    let sinks = g.sink_set();
    let mut blocks = Vec::new();
    for w in sinks.iter() {
        let mut ps = vec![Path::Trivial(w)];
        ps.extend(all_paths.iter().filter(|p| p.range(g).contains(w)).cloned());
        blocks.push(PairBlock { sink: w, paths: ps });
    }
    let shapes = blocks
        .iter()
        .map(|b| BlockShape {
            label: b.sink.to_string(),
            labels: b.paths.iter().map(|p| p.display(g).to_string()).collect(),
            degrees: Some(b.paths.iter().map(|p| p.len() as i64).collect()),
        })
        .collect();
    let index = blocks
        .iter()
        .map(|b| b.paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect())
        .collect();
    let rep = Representation {
        graph: g.clone(),
        basis: PathPairBasis { blocks },
        algebra: MatrixAlgebra::new(field, shapes),
        index,
    };
    if let Err(v) = rep.verify_ck() {
        return Err(Error::Internal(format!("representation violates {v}")));
    }
    Ok(rep)
}

impl Representation {
    pub fn field(&self) -> FieldDescriptor {
        self.algebra.field
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn one_scalar(&self) -> Scalar {
        Scalar::one(self.field())
    }

    pub fn s(&self, e: usize) -> Element {
        let g = &self.graph;
        let edge = &g.edges[e];
        let mut x = self.algebra.zero();
        for (b, block) in self.basis.blocks.iter().enumerate() {
            for (j, alpha) in block.paths.iter().enumerate() {
                if !edge.range.contains(alpha.source(g)) {
                    continue;
                }
                let mut es = vec![e];
                es.extend_from_slice(alpha.edges());
                let i = self.index[b][&Path::Edges(es)];
                x.blocks[b].set(i, j, self.one_scalar());
            }
        }
        x
    }

    pub fn s_star(&self, e: usize) -> Element {
        self.algebra.involute(&self.s(e))
    }

    pub fn p(&self, a: &UpSet) -> Element {
        let g = &self.graph;
        let mut x = self.algebra.zero();
        for (b, block) in self.basis.blocks.iter().enumerate() {
            for (i, alpha) in block.paths.iter().enumerate() {
                if a.contains(alpha.source(g)) {
                    x.blocks[b].set(i, i, self.one_scalar());
                }
            }
        }
        x
    }

    pub fn p_vertex(&self, v: Vertex) -> Element {
        self.p(&UpSet::singleton(v))
    }

    /// `s_α`, with `s_v = p_v` for a trivial path.
    pub fn s_path(&self, alpha: &Path) -> Element {
        match alpha {
            Path::Trivial(v) => self.p_vertex(*v),
            Path::Edges(es) => es
                .iter()
                .map(|&e| self.s(e))
                .reduce(|x, y| self.algebra.mul(&x, &y))
                .unwrap(),
        }
    }

    /// `s_α p_A s_β*`.
    pub fn monomial(&self, alpha: &Path, a: &UpSet, beta: &Path) -> Element {
        let alg = &self.algebra;
        let left = alg.mul(&self.s_path(alpha), &self.p(a));
        alg.mul(&left, &alg.involute(&self.s_path(beta)))
    }

    /// The sets the relations are checked on: cells and singletons.
    pub fn test_sets(&self) -> Vec<UpSet> {
        let ctx = self.graph.algebra_context();
        let mut out: Vec<UpSet> = ctx.cells().iter().map(|c| c.set.clone()).collect();
        out.extend(self.graph.universe.as_set().iter().map(UpSet::singleton));
        out.push(UpSet::empty());
        out.push(self.graph.universe.as_set());
        out
    }

    /// The four defining relations as exact matrix identities.
    pub fn verify_ck(&self) -> Result<(), String> {
        let alg = &self.algebra;
        let g = &self.graph;
        let sets = self.test_sets();
        if !alg.is_zero(&self.p(&UpSet::empty())) {
            return Err("(1): p_∅ ≠ 0".into());
        }
        for a in &sets {
            for b in &sets {
                if alg.mul(&self.p(a), &self.p(b)) != self.p(&a.intersection(b)) {
                    return Err(format!("(1): p_A p_B ≠ p_(A∩B) for A = {a}, B = {b}"));
                }
                if alg.add(&self.p(a), &self.p(b)) != alg.add(&self.p(&a.union(b)), &self.p(&a.intersection(b))) {
                    return Err(format!("(1): p_A + p_B ≠ p_(A∪B) + p_(A∩B) for A = {a}, B = {b}"));
                }
            }
        }
        for (i, e) in g.edges.iter().enumerate() {
            let se = self.s(i);
            if alg.mul(&self.p_vertex(e.source), &se) != se || alg.mul(&se, &self.p(&e.range)) != se {
                return Err(format!("(2): s_{} is not p_s(e) s_e p_r(e)", e.id));
            }
            for (j, f) in g.edges.iter().enumerate() {
                let lhs = alg.mul(&self.s_star(i), &self.s(j));
                let rhs = if i == j { self.p(&e.range) } else { alg.zero() };
                if lhs != rhs {
                    return Err(format!("(3): s_{}* s_{} is wrong", e.id, f.id));
                }
            }
        }
        for v in g.emitters().iter() {
            let sum = alg.sum(
                g.out_edges(v)
                    .map(|i| alg.mul(&self.s(i), &self.s_star(i)))
                    .collect::<Vec<_>>()
                    .iter(),
            );
            if sum != self.p_vertex(v) {
                return Err(format!("(4): p_{v} ≠ Σ s_e s_e*"));
            }
        }
        Ok(())
    }

    /// Sample elements: vertex projections, `s_e`, `s_e*`, and cells.
    pub fn named_elements(&self) -> Vec<(String, Element)> {
        let g = &self.graph;
        let mut out = Vec::new();
        for v in g.universe.as_set().iter() {
            out.push((format!("p_{v}"), self.p_vertex(v)));
        }
        for (i, e) in g.edges.iter().enumerate() {
            out.push((format!("s_{}", e.id), self.s(i)));
            out.push((format!("s_{}*", e.id), self.s_star(i)));
        }
        for c in g.algebra_context().cells() {
            out.push((format!("p_{}", c.set), self.p(&c.set)));
        }
        out
    }

    /// Matrices as nested arrays of scalar strings, keyed by sink.
    pub fn to_json(&self, x: &Element) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .basis
            .blocks
            .iter()
            .zip(&x.blocks)
            .map(|(b, m)| {
                let rows: Vec<Vec<String>> = (0..m.n)
                    .map(|i| m.row(i).iter().map(ToString::to_string).collect())
                    .collect();
                serde_json::json!({ "sink": b.sink, "matrix": rows })
            })
            .collect();
        serde_json::Value::Array(blocks)
    }
}

/// One representation per factor field of `R`.
#[derive(Clone, Debug)]
pub struct ProductRepresentation {
    pub ring: RingDescriptor,
    pub factors: Vec<Representation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductElement(pub Vec<Element>);

pub fn product_build(g: &Ultragraph, ring: &RingDescriptor) -> Result<ProductRepresentation, Error> {
    let factors = ring
        .factors
        .iter()
        .map(|&f| build_representation(g, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProductRepresentation {
        ring: ring.clone(),
        factors,
    })
}

impl ProductRepresentation {
    fn map(&self, f: impl Fn(&Representation) -> Element) -> ProductElement {
        ProductElement(self.factors.iter().map(f).collect())
    }

    fn zip(
        &self,
        x: &ProductElement,
        y: &ProductElement,
        f: impl Fn(&MatrixAlgebra, &Element, &Element) -> Element,
    ) -> ProductElement {
        ProductElement(
            self.factors
                .iter()
                .zip(x.0.iter().zip(&y.0))
                .map(|(r, (a, b))| f(&r.algebra, a, b))
                .collect(),
        )
    }

    pub fn zero(&self) -> ProductElement {
        self.map(|r| r.algebra.zero())
    }

    pub fn one(&self) -> ProductElement {
        self.map(|r| r.algebra.one())
    }

    pub fn s(&self, e: usize) -> ProductElement {
        self.map(|r| r.s(e))
    }

    pub fn s_star(&self, e: usize) -> ProductElement {
        self.map(|r| r.s_star(e))
    }

    pub fn p(&self, a: &UpSet) -> ProductElement {
        self.map(|r| r.p(a))
    }

    /// `Σ c·s_α p_A s_β*` with integer coefficients read in each factor.
    pub fn combination(&self, terms: &[(i64, Path, UpSet, Path)]) -> ProductElement {
        self.map(|r| {
            let alg = &r.algebra;
            terms.iter().fold(alg.zero(), |acc, (c, a, set, b)| {
                alg.add(&acc, &alg.scale(&alg.scalar(*c), &r.monomial(a, set, b)))
            })
        })
    }

    pub fn add(&self, x: &ProductElement, y: &ProductElement) -> ProductElement {
        self.zip(x, y, MatrixAlgebra::add)
    }

    pub fn mul(&self, x: &ProductElement, y: &ProductElement) -> ProductElement {
        self.zip(x, y, MatrixAlgebra::mul)
    }

    pub fn involute(&self, x: &ProductElement) -> ProductElement {
        ProductElement(
            self.factors
                .iter()
                .zip(&x.0)
                .map(|(r, a)| r.algebra.involute(a))
                .collect(),
        )
    }

    /// Homogeneous iff every nonzero component has the same degree.
    pub fn homogeneous_degree(&self, x: &ProductElement) -> Option<i64> {
        let mut deg = None;
        for (r, a) in self.factors.iter().zip(&x.0) {
            if r.algebra.is_zero(a) {
                continue;
            }
            let d = r.algebra.homogeneous_degree(a)?;
            if deg.is_some_and(|e| e != d) {
                return None;
            }
            deg = Some(d);
        }
        Some(deg.unwrap_or(0))
    }

    pub fn degree_decompose(&self, x: &ProductElement) -> std::collections::BTreeMap<i64, ProductElement> {
        let mut out = std::collections::BTreeMap::new();
        for (k, (r, a)) in self.factors.iter().zip(&x.0).enumerate() {
            for (d, part) in r.algebra.degree_decompose(a) {
                out.entry(d).or_insert_with(|| self.zero()).0[k] = part;
            }
        }
        out
    }

    pub fn left_annihilator(&self, bs: &[ProductElement]) -> Vec<Subspace> {
        self.factors
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let comp: Vec<Element> = bs.iter().map(|b| b.0[k].clone()).collect();
                r.algebra.left_annihilator(&comp)
            })
            .collect()
    }

    /// Succeeds iff every component succeeds.
    pub fn generator(
        &self,
        ideal: &[Subspace],
        side: Side,
        kind: GeneratorKind,
        graded: bool,
    ) -> Result<Option<ProductElement>, Error> {
        let mut out = Vec::new();
        for (r, s) in self.factors.iter().zip(ideal) {
            match r.algebra.generator(s, side, kind, graded)? {
                Some(e) => out.push(e),
                None => return Ok(None),
            }
        }
        Ok(Some(ProductElement(out)))
    }
}

/// The matrix of a basis pair as an element: `E_{(α,w),(β,w)}`.
pub fn matrix_unit(rep: &Representation, block: usize, i: usize, j: usize) -> Element {
    let mut x = rep.algebra.zero();
    let n = rep.basis.blocks[block].paths.len();
    let mut m = Matrix::zeros(n, rep.field());
    m.set(i, j, Scalar::one(rep.field()));
    x.blocks[block] = m;
    x
}
