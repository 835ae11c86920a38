//! Finite direct sums of full matrix algebras `⊕_w M_{n_w}(K)` with a
//! ℤ-grading by basis labels and the transpose involution.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::classifier::FieldDescriptor;
use crate::error::Error;

use super::linalg::{self, Row};
use super::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Matrix {
    pub n: usize,
    /// Row-major.
    pub data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(n: usize, field: FieldDescriptor) -> Self {
        Matrix {
            n,
            data: vec![Scalar::zero(field); n * n],
        }
    }

    pub fn identity(n: usize, field: FieldDescriptor) -> Self {
        let mut m = Self::zeros(n, field);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one(field);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> Row {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let n = self.n;
        // zeros of the right field without carrying the field around
        let mut out = o.data.iter().map(|x| Scalar::zero(x.field())).collect::<Vec<_>>();
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] = &out[i * n + j] + &(a * b);
                    }
                }
            }
        }
        Matrix { n, data: out }
    }

    fn zip(&self, o: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        Matrix {
            n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n].clone()).collect(),
        }
    }
}

/// One block `M_n(K)`: `degrees[i]` grades basis vector `i`, so the entry
/// `(i, j)` has degree `degrees[i] - degrees[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockShape {
    pub label: String,
    pub labels: Vec<String>,
    pub degrees: Option<Vec<i64>>,
}

impl BlockShape {
    pub fn n(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Element {
    pub blocks: Vec<Matrix>,
}

/// A subspace of the algebra as an RREF basis in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub basis: Vec<Row>,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Idempotent,
    Projection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Ok {
        trials: usize,
    },
    Counterexample {
        coefficients: Vec<u64>,
        elements: Vec<Element>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixAlgebra {
    pub field: FieldDescriptor,
    pub blocks: Vec<BlockShape>,
    /// Whether the transpose is an involution of this presentation. Corners
    /// by non-diagonal idempotents lose it.
    pub star: bool,
}

impl MatrixAlgebra {
    pub fn new(field: FieldDescriptor, blocks: Vec<BlockShape>) -> Self {
        MatrixAlgebra {
            field,
            blocks,
            star: true,
        }
    }

    /// Plain `⊕ M_{n_i}(K)` with everything in degree 0.
    pub fn from_sizes(field: FieldDescriptor, sizes: &[usize]) -> Self {
        let blocks = sizes
            .iter()
            .enumerate()
            .map(|(b, &n)| BlockShape {
                label: format!("B{b}"),
                labels: (0..n).map(|i| i.to_string()).collect(),
                degrees: Some(vec![0; n]),
            })
            .collect();
        Self::new(field, blocks)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(BlockShape::n).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.n() * b.n()).sum()
    }

    pub fn is_graded(&self) -> bool {
        self.blocks.iter().all(|b| b.degrees.is_some())
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = acc;
                acc += b.n() * b.n();
                o
            })
            .collect()
    }

    pub fn zero(&self) -> Element {
        Element {
            blocks: self.blocks.iter().map(|b| Matrix::zeros(b.n(), self.field)).collect(),
        }
    }

    pub fn one(&self) -> Element {
        Element {
            blocks: self
                .blocks
                .iter()
                .map(|b| Matrix::identity(b.n(), self.field))
                .collect(),
        }
    }

    pub fn scalar(&self, n: i64) -> Scalar {
        Scalar::from_i64(self.field, n)
    }

    /// Matrix unit `E_{ij}` in block `b`.
    pub fn unit(&self, b: usize, i: usize, j: usize) -> Element {
        let mut x = self.zero();
        x.blocks[b].set(i, j, Scalar::one(self.field));
        x
    }

    pub fn units(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for (b, s) in self.blocks.iter().enumerate() {
            for i in 0..s.n() {
                for j in 0..s.n() {
                    out.push(self.unit(b, i, j));
                }
            }
        }
        out
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        Element {
            blocks: x.blocks.iter().zip(&y.blocks).map(|(a, b)| a.mul(b)).collect(),
        }
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element {
            blocks: x
                .blocks
                .iter()
                .zip(&y.blocks)
                .map(|(a, b)| a.zip(b, |p, q| p + q))
                .collect(),
        }
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        Element {
            blocks: x
                .blocks
                .iter()
                .zip(&y.blocks)
                .map(|(a, b)| a.zip(b, |p, q| p - q))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar, x: &Element) -> Element {
        Element {
            blocks: x
                .blocks
                .iter()
                .map(|m| Matrix {
                    n: m.n,
                    data: m.data.iter().map(|v| c * v).collect(),
                })
                .collect(),
        }
    }

    pub fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a Element>) -> Element {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn is_zero(&self, x: &Element) -> bool {
        x.blocks.iter().all(Matrix::is_zero)
    }

    /// `x*`: blockwise transpose, scalars fixed.
    pub fn involute(&self, x: &Element) -> Element {
        Element {
            blocks: x.blocks.iter().map(Matrix::transpose).collect(),
        }
    }

    pub fn coords(&self, x: &Element) -> Row {
        x.blocks.iter().flat_map(|m| m.data.iter().cloned()).collect()
    }

    pub fn from_coords(&self, v: &[Scalar]) -> Element {
        let mut at = 0;
        Element {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    let n = b.n();
                    let m = Matrix {
                        n,
                        data: v[at..at + n * n].to_vec(),
                    };
                    at += n * n;
                    m
                })
                .collect(),
        }
    }

    fn entry_degree(&self, b: usize, i: usize, j: usize) -> i64 {
        let d = self.blocks[b].degrees.as_ref().expect("graded algebra");
        d[i] - d[j]
    }

    /// Homogeneous components by degree. Zero components are omitted.
    pub fn degree_decompose(&self, x: &Element) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (b, m) in x.blocks.iter().enumerate() {
            for i in 0..m.n {
                for j in 0..m.n {
                    let v = m.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    let d = self.entry_degree(b, i, j);
                    out.entry(d).or_insert_with(|| self.zero()).blocks[b].set(i, j, v.clone());
                }
            }
        }
        out
    }

    /// The degree of a nonzero homogeneous element, `Some(0)` for zero, and
    /// `None` when `x` mixes degrees.
    pub fn homogeneous_degree(&self, x: &Element) -> Option<i64> {
        let parts = self.degree_decompose(x);
        match parts.len() {
            0 => Some(0),
            1 => parts.keys().next().copied(),
            _ => None,
        }
    }

    pub fn subspace(&self, xs: &[Element]) -> Subspace {
        let mut rows: Vec<Row> = xs.iter().map(|x| self.coords(x)).collect();
        let pivots = linalg::rref(&mut rows, self.dim());
        Subspace { basis: rows, pivots }
    }

    pub fn contains(&self, s: &Subspace, x: &Element) -> bool {
        linalg::reduce(&s.basis, &s.pivots, &self.coords(x))
            .iter()
            .all(Scalar::is_zero)
    }

    pub fn elements(&self, s: &Subspace) -> Vec<Element> {
        s.basis.iter().map(|r| self.from_coords(r)).collect()
    }

    pub fn transpose_subspace(&self, s: &Subspace) -> Subspace {
        let xs: Vec<Element> = self.elements(s).iter().map(|x| self.involute(x)).collect();
        self.subspace(&xs)
    }

    fn build_left_structured(&self, spaces: &[Vec<Row>]) -> Subspace {
        // E_i ⊗ v in row-major order is already reduced
        let offsets = self.offsets();
        let dim = self.dim();
        let mut basis = Vec::new();
        let mut pivots = Vec::new();
        for (b, vs) in spaces.iter().enumerate() {
            let n = self.blocks[b].n();
            let vp = linalg::pivots_of(vs);
            for i in 0..n {
                for (v, &p) in vs.iter().zip(&vp) {
                    let mut row = vec![Scalar::zero(self.field); dim];
                    for (j, x) in v.iter().enumerate() {
                        row[offsets[b] + i * n + j] = x.clone();
                    }
                    basis.push(row);
                    pivots.push(offsets[b] + i * n + p);
                }
            }
        }
        Subspace { basis, pivots }
    }

    fn build_right_structured(&self, spaces: &[Vec<Row>]) -> Subspace {
        // v ⊗ E_j sorted by (pivot of v, j) is reduced
        let offsets = self.offsets();
        let dim = self.dim();
        let mut basis = Vec::new();
        let mut pivots = Vec::new();
        for (b, vs) in spaces.iter().enumerate() {
            let n = self.blocks[b].n();
            let vp = linalg::pivots_of(vs);
            for (v, &p) in vs.iter().zip(&vp) {
                for j in 0..n {
                    let mut row = vec![Scalar::zero(self.field); dim];
                    for (i, x) in v.iter().enumerate() {
                        row[offsets[b] + i * n + j] = x.clone();
                    }
                    basis.push(row);
                    pivots.push(offsets[b] + p * n + j);
                }
            }
        }
        Subspace { basis, pivots }
    }

    /// `{s : s·b = 0 for every b ∈ bs}`.
    pub fn left_annihilator(&self, bs: &[Element]) -> Subspace {
        let spaces: Vec<Vec<Row>> = (0..self.blocks.len())
            .map(|b| {
                let n = self.blocks[b].n();
                // y·x = 0 for all x ⇔ y ⟂ every column of every x
                let rows: Vec<Row> = bs
                    .iter()
                    .flat_map(|x| (0..n).map(move |j| x.blocks[b].col(j)))
                    .collect();
                linalg::nullspace(&rows, n, self.field)
            })
            .collect();
        self.build_left_structured(&spaces)
    }

    /// `{s : b·s = 0 for every b ∈ bs}`.
    pub fn right_annihilator(&self, bs: &[Element]) -> Subspace {
        let spaces: Vec<Vec<Row>> = (0..self.blocks.len())
            .map(|b| {
                let n = self.blocks[b].n();
                let rows: Vec<Row> = bs
                    .iter()
                    .flat_map(|x| (0..n).map(move |i| x.blocks[b].row(i).to_vec()))
                    .collect();
                linalg::nullspace(&rows, n, self.field)
            })
            .collect();
        self.build_right_structured(&spaces)
    }

    /// The left ideal `A·x₁ + … + A·x_k`.
    pub fn left_ideal(&self, xs: &[Element]) -> Subspace {
        let spaces: Vec<Vec<Row>> = (0..self.blocks.len())
            .map(|b| {
                let n = self.blocks[b].n();
                let mut rows: Vec<Row> = xs
                    .iter()
                    .flat_map(|x| (0..n).map(move |i| x.blocks[b].row(i).to_vec()))
                    .collect();
                linalg::rref(&mut rows, n);
                rows
            })
            .collect();
        self.build_left_structured(&spaces)
    }

    /// The right ideal `x₁·A + … + x_k·A`.
    pub fn right_ideal(&self, xs: &[Element]) -> Subspace {
        let spaces: Vec<Vec<Row>> = (0..self.blocks.len())
            .map(|b| {
                let n = self.blocks[b].n();
                let mut rows: Vec<Row> = xs
                    .iter()
                    .flat_map(|x| (0..n).map(move |j| x.blocks[b].col(j)))
                    .collect();
                linalg::rref(&mut rows, n);
                rows
            })
            .collect();
        self.build_right_structured(&spaces)
    }

    /// Row spaces `V_b` with `I = ⊕_b K^{n_b} ⊗ V_b` (left) or column
    /// spaces `W_b` with `I = ⊕_b W_b ⊗ K^{n_b}` (right), in RREF.
    pub fn ideal_structure(&self, s: &Subspace, side: Side) -> Result<Vec<Vec<Row>>, Error> {
        let elems = self.elements(s);
        let mut spaces = Vec::new();
        let mut expected = 0;
        for (b, shape) in self.blocks.iter().enumerate() {
            let n = shape.n();
            let mut rows: Vec<Row> = elems
                .iter()
                .flat_map(|x| {
                    (0..n).map(move |i| match side {
                        Side::Left => x.blocks[b].row(i).to_vec(),
                        Side::Right => x.blocks[b].col(i),
                    })
                })
                .filter(|r| r.iter().any(|v| !v.is_zero()))
                .collect();
            linalg::rref(&mut rows, n);
            expected += n * rows.len();
            spaces.push(rows);
        }
        // s always sits inside the tensor form; equal dimension means equality
        if expected != s.dim() {
            return Err(Error::NotALeftIdeal);
        }
        Ok(spaces)
    }

    pub fn is_left_ideal(&self, s: &Subspace) -> bool {
        self.ideal_structure(s, Side::Left).is_ok()
    }

    pub fn is_right_ideal(&self, s: &Subspace) -> bool {
        self.ideal_structure(s, Side::Right).is_ok()
    }

    /// Spanned by homogeneous elements: every degree part of every basis
    /// vector stays inside.
    pub fn is_graded_subspace(&self, s: &Subspace) -> bool {
        self.is_graded()
            && self
                .elements(s)
                .iter()
                .all(|x| self.degree_decompose(x).values().all(|part| self.contains(s, part)))
    }

    /// For an ideal in tensor form the grading lives on `V_b`: the ideal is
    /// graded iff each `V_b` is spanned by vectors of a single label degree.
    fn structure_is_graded(&self, spaces: &[Vec<Row>]) -> bool {
        spaces.iter().enumerate().all(|(b, vs)| {
            let Some(deg) = &self.blocks[b].degrees else {
                return false;
            };
            let pivots = linalg::pivots_of(vs);
            vs.iter().all(|v| {
                let mut classes: BTreeMap<i64, Row> = BTreeMap::new();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        classes
                            .entry(deg[j])
                            .or_insert_with(|| vec![Scalar::zero(self.field); v.len()])[j] = x.clone();
                    }
                }
                classes.len() == 1
                    || classes
                        .values()
                        .all(|part| linalg::reduce(vs, &pivots, part).iter().all(Scalar::is_zero))
            })
        })
    }

    /// Search for `e` with `e² = e` and `I = A·e` (left) or `I = e·A`
    /// (right), optionally self-adjoint and of degree 0.
    ///
    /// In block `b` with row space `V` (basis rows `Vm`, `d × n`) put
    /// `e = C·Vm`. Then `I = A·e` and `e² = e` iff `Vm·C = I_d`, a linear
    /// system in `C`; self-adjointness and degree 0 add linear equations.
    /// A right ideal is handled through its transpose.
    pub fn generator(
        &self,
        s: &Subspace,
        side: Side,
        kind: GeneratorKind,
        graded: bool,
    ) -> Result<Option<Element>, Error> {
        if kind == GeneratorKind::Projection && !self.star {
            return Err(Error::InvalidInput("no involution on this algebra".into()));
        }
        let spaces = self.ideal_structure(s, side)?;
        if graded && !self.structure_is_graded(&spaces) {
            return Err(Error::NotGraded);
        }
        let mut out = self.zero();
        for (b, vm) in spaces.iter().enumerate() {
            match self.block_generator(b, vm, kind, graded) {
                Some(e) => {
                    out.blocks[b] = match side {
                        Side::Left => e,
                        Side::Right => e.transpose(),
                    }
                }
                None => return Ok(None),
            }
        }
        self.check_generator(s, &out, side, kind, graded)?;
        Ok(Some(out))
    }

    fn block_generator(&self, b: usize, vm: &[Row], kind: GeneratorKind, graded: bool) -> Option<Matrix> {
        let n = self.blocks[b].n();
        let d = vm.len();
        let f = self.field;
        if d == 0 {
            return Some(Matrix::zeros(n, f));
        }
        let unknowns = n * d;
        let var = |i: usize, k: usize| i * d + k;
        let mut a: Vec<Row> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        // Vm·C = I_d
        for r in 0..d {
            for k in 0..d {
                let mut row = vec![Scalar::zero(f); unknowns];
                for i in 0..n {
                    row[var(i, k)] = vm[r][i].clone();
                }
                a.push(row);
                rhs.push(if r == k { Scalar::one(f) } else { Scalar::zero(f) });
            }
        }
        // e_ij = Σ_k C_ik Vm_kj
        let entry = |i: usize, j: usize, sign: &Scalar, row: &mut Row| {
            for k in 0..d {
                let v = &vm[k][j];
                if !v.is_zero() {
                    row[var(i, k)] = &row[var(i, k)] + &(sign * v);
                }
            }
        };
        let one = Scalar::one(f);
        let minus = -&one;
        if kind == GeneratorKind::Projection {
            for i in 0..n {
                for j in i + 1..n {
                    let mut row = vec![Scalar::zero(f); unknowns];
                    entry(i, j, &one, &mut row);
                    entry(j, i, &minus, &mut row);
                    if row.iter().any(|x| !x.is_zero()) {
                        a.push(row);
                        rhs.push(Scalar::zero(f));
                    }
                }
            }
        }
        if graded {
            for i in 0..n {
                for j in 0..n {
                    if self.entry_degree(b, i, j) != 0 {
                        let mut row = vec![Scalar::zero(f); unknowns];
                        entry(i, j, &one, &mut row);
                        if row.iter().any(|x| !x.is_zero()) {
                            a.push(row);
                            rhs.push(Scalar::zero(f));
                        }
                    }
                }
            }
        }
        let c = linalg::solve(&a, &rhs, unknowns, f)?;
        let mut e = Matrix::zeros(n, f);
        for i in 0..n {
            for j in 0..n {
                let mut v = Scalar::zero(f);
                for k in 0..d {
                    if !c[var(i, k)].is_zero() && !vm[k][j].is_zero() {
                        v = &v + &(&c[var(i, k)] * &vm[k][j]);
                    }
                }
                e.set(i, j, v);
            }
        }
        Some(e)
    }

    /// Re-verify a generator by multiplication.
    fn check_generator(
        &self,
        s: &Subspace,
        e: &Element,
        side: Side,
        kind: GeneratorKind,
        graded: bool,
    ) -> Result<(), Error> {
        let fail = |what: &str| Err(Error::Internal(format!("generator check failed: {what}")));
        if self.mul(e, e) != *e {
            return fail("not idempotent");
        }
        if !self.contains(s, e) {
            return fail("not in the ideal");
        }
        let generated = match side {
            Side::Left => self.left_ideal(std::slice::from_ref(e)),
            Side::Right => self.right_ideal(std::slice::from_ref(e)),
        };
        if generated.dim() != s.dim() {
            return fail("generates a smaller ideal");
        }
        if kind == GeneratorKind::Projection && self.involute(e) != *e {
            return fail("not self-adjoint");
        }
        if graded && self.homogeneous_degree(e) != Some(0) {
            return fail("not of degree 0");
        }
        Ok(())
    }

    pub fn idempotent_generator(&self, s: &Subspace) -> Result<Option<Element>, Error> {
        self.generator(s, Side::Left, GeneratorKind::Idempotent, false)
    }

    pub fn projection_generator(&self, s: &Subspace) -> Result<Option<Element>, Error> {
        self.generator(s, Side::Left, GeneratorKind::Projection, false)
    }

    pub fn graded_idempotent_generator(&self, s: &Subspace) -> Result<Option<Element>, Error> {
        self.generator(s, Side::Left, GeneratorKind::Idempotent, true)
    }

    /// `y` homogeneous of degree `-deg x` with `x·y·x = x`.
    pub fn graded_vn_regular_witness(&self, x: &Element) -> Result<Option<Element>, Error> {
        let deg = self.homogeneous_degree(x).ok_or(Error::NotHomogeneous)?;
        let f = self.field;
        let mut y = self.zero();
        for (b, m) in x.blocks.iter().enumerate() {
            let n = m.n;
            let live_rows: Vec<usize> = (0..n).filter(|&i| m.row(i).iter().any(|v| !v.is_zero())).collect();
            let live_cols: Vec<usize> = (0..n).filter(|&j| (0..n).any(|i| !m.get(i, j).is_zero())).collect();
            // y_ij only matters for i a live column and j a live row of x
            let mut vars = Vec::new();
            for &i in &live_cols {
                for &j in &live_rows {
                    if self.entry_degree(b, i, j) == -deg {
                        vars.push((i, j));
                    }
                }
            }
            let mut a = Vec::new();
            let mut rhs = Vec::new();
            for &p in &live_rows {
                for &q in &live_cols {
                    let row: Row = vars.iter().map(|&(i, j)| m.get(p, i) * m.get(j, q)).collect();
                    a.push(row);
                    rhs.push(m.get(p, q).clone());
                }
            }
            let Some(sol) = linalg::solve(&a, &rhs, vars.len(), f) else {
                return Ok(None);
            };
            for (&(i, j), v) in vars.iter().zip(sol) {
                y.blocks[b].set(i, j, v);
            }
        }
        if self.mul(&self.mul(x, &y), x) != *x {
            return Err(Error::Internal("x·y·x ≠ x after solving".into()));
        }
        Ok(Some(y))
    }

    /// The corner `u·A·u`, presented again as a sum of matrix algebras.
    pub fn corner(&self, u: &Element) -> Result<Corner, Error> {
        if self.mul(u, u) != *u {
            return Err(Error::NotIdempotent);
        }
        let f = self.field;
        let mut maps = Vec::new();
        let mut blocks = Vec::new();
        let mut diagonal = true;
        for (b, m) in u.blocks.iter().enumerate() {
            let n = m.n;
            let mut r: Vec<Row> = (0..n).map(|i| m.row(i).to_vec()).collect();
            let pivots = linalg::rref(&mut r, n);
            // u = U·R with U the pivot columns of u, and R·U = I
            let cols: Vec<Row> = pivots.iter().map(|&p| m.col(p)).collect();
            let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || m.get(i, j).is_zero()));
            diagonal &= is_diag;
            let shape = &self.blocks[b];
            let degrees = match (&shape.degrees, is_diag) {
                (Some(d), true) => Some(pivots.iter().map(|&p| d[p]).collect()),
                _ => None,
            };
            blocks.push(BlockShape {
                label: shape.label.clone(),
                labels: pivots.iter().map(|&p| shape.labels[p].clone()).collect(),
                degrees,
            });
            maps.push(CornerMap {
                u_cols: cols,
                r_rows: r,
                n,
            });
        }
        let mut algebra = MatrixAlgebra::new(f, blocks);
        algebra.star = self.star && diagonal;
        Ok(Corner {
            algebra,
            idempotent: u.clone(),
            maps,
        })
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R, density: f64) -> Element {
        let mut x = self.zero();
        for m in x.blocks.iter_mut() {
            for v in m.data.iter_mut() {
                if rng.gen_bool(density) {
                    *v = self.random_scalar(rng);
                }
            }
        }
        x
    }

    /// Nonzero-ish random element of a single degree.
    pub fn random_homogeneous<R: Rng>(&self, rng: &mut R, density: f64) -> Element {
        let x = self.random_element(rng, density.max(0.3));
        let parts = self.degree_decompose(&x);
        if parts.is_empty() {
            return x;
        }
        let k = rng.gen_range(0..parts.len());
        parts.into_values().nth(k).unwrap()
    }

    fn random_scalar<R: Rng>(&self, rng: &mut R) -> Scalar {
        match self.field {
            FieldDescriptor::Rationals => {
                let num = rng.gen_range(-3i64..=3);
                let den = rng.gen_range(1i64..=2);
                Scalar::ratio(num, den)
            }
            FieldDescriptor::PrimeField(p) => self.scalar(rng.gen_range(0..p) as i64),
        }
    }

    /// Checks `Σ xᵢxᵢ* = 0 ⇒ every xᵢ = 0`.
    ///
    /// Over ℚ the trace of `Σ xᵢxᵢ*` in a block is the sum of squares of all
    /// entries, so a nonzero tuple never sums to zero; random tuples test it.
    /// Over `F_p` a scaled identity tuple is a counterexample.
    pub fn positive_definite_probe<R: Rng>(&self, trials: usize, rng: &mut R) -> ProbeOutcome {
        if let Some(coefficients) = self.field.square_sum_witness() {
            let one = self.one();
            let elements: Vec<Element> = coefficients
                .iter()
                .map(|&c| self.scale(&self.scalar(c as i64), &one))
                .collect();
            let total = self.sum(
                elements
                    .iter()
                    .map(|x| self.mul(x, &self.involute(x)))
                    .collect::<Vec<_>>()
                    .iter(),
            );
            assert!(self.is_zero(&total) && elements.iter().all(|x| !self.is_zero(x)));
            return ProbeOutcome::Counterexample { coefficients, elements };
        }
        for _ in 0..trials {
            let k = rng.gen_range(1..=3);
            let xs: Vec<Element> = (0..k).map(|_| self.random_element(rng, 0.3)).collect();
            let total = self.sum(
                xs.iter()
                    .map(|x| self.mul(x, &self.involute(x)))
                    .collect::<Vec<_>>()
                    .iter(),
            );
            let all_zero = xs.iter().all(|x| self.is_zero(x));
            let trace_positive = total.blocks.iter().any(|m| {
                let t = (0..m.n).fold(Scalar::zero(self.field), |acc, i| &acc + m.get(i, i));
                !t.is_zero() && !t.is_negative()
            });
            assert_eq!(self.is_zero(&total), all_zero, "sum of xx* vanished on a nonzero tuple");
            assert_eq!(trace_positive, !all_zero);
        }
        ProbeOutcome::Ok { trials }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerMap {
    /// Columns of `U`.
    u_cols: Vec<Row>,
    /// Rows of `R`.
    r_rows: Vec<Row>,
    n: usize,
}

#[derive(Clone, Debug)]
pub struct Corner {
    pub algebra: MatrixAlgebra,
    pub idempotent: Element,
    maps: Vec<CornerMap>,
}

impl Corner {
    /// `x ∈ uAu ↦ R·x·U`.
    pub fn restrict(&self, x: &Element) -> Element {
        let f = self.algebra.field;
        Element {
            blocks: x
                .blocks
                .iter()
                .zip(&self.maps)
                .map(|(m, map)| {
                    let r = map.r_rows.len();
                    let mut out = Matrix::zeros(r, f);
                    for a in 0..r {
                        for c in 0..r {
                            let mut v = Scalar::zero(f);
                            for i in 0..map.n {
                                if map.r_rows[a][i].is_zero() {
                                    continue;
                                }
                                for j in 0..map.n {
                                    let t = &map.u_cols[c][j];
                                    if !t.is_zero() && !m.get(i, j).is_zero() {
                                        v = &v + &(&(&map.r_rows[a][i] * m.get(i, j)) * t);
                                    }
                                }
                            }
                            out.set(a, c, v);
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    /// `y ↦ U·y·R`.
    pub fn embed(&self, y: &Element) -> Element {
        let f = self.algebra.field;
        Element {
            blocks: y
                .blocks
                .iter()
                .zip(&self.maps)
                .map(|(m, map)| {
                    let n = map.n;
                    let r = map.r_rows.len();
                    let mut out = Matrix::zeros(n, f);
                    for i in 0..n {
                        for j in 0..n {
                            let mut v = Scalar::zero(f);
                            for a in 0..r {
                                if map.u_cols[a][i].is_zero() {
                                    continue;
                                }
                                for c in 0..r {
                                    if !m.get(a, c).is_zero() && !map.r_rows[c][j].is_zero() {
                                        v = &v + &(&(&map.u_cols[a][i] * m.get(a, c)) * &map.r_rows[c][j]);
                                    }
                                }
                            }
                            out.set(i, j, v);
                        }
                    }
                    out
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: FieldDescriptor = FieldDescriptor::Rationals;

    #[test]
    fn annihilator_extremes() {
        let a = MatrixAlgebra::from_sizes(Q, &[2, 1]);
        assert_eq!(a.left_annihilator(&[a.one()]).dim(), 0);
        assert_eq!(a.left_annihilator(&[a.zero()]).dim(), a.dim());
        assert_eq!(a.right_annihilator(&[a.one()]).dim(), 0);
        assert_eq!(a.right_annihilator(&[a.zero()]).dim(), a.dim());
    }

    #[test]
    fn annihilator_elements_annihilate() {
        let a = MatrixAlgebra::from_sizes(Q, &[3, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = a.random_element(&mut rng, 0.3);
        let l = a.left_annihilator(std::slice::from_ref(&x));
        for y in a.elements(&l) {
            assert!(a.is_zero(&a.mul(&y, &x)));
        }
        let r = a.right_annihilator(std::slice::from_ref(&x));
        for y in a.elements(&r) {
            assert!(a.is_zero(&a.mul(&x, &y)));
        }
        // reduced form: recomputing the span changes nothing
        assert_eq!(a.subspace(&a.elements(&l)), l);
        assert_eq!(a.subspace(&a.elements(&r)), r);
    }

    #[test]
    fn generators_of_extremes() {
        let a = MatrixAlgebra::from_sizes(Q, &[2]);
        let zero = a.subspace(&[]);
        assert_eq!(a.idempotent_generator(&zero).unwrap(), Some(a.zero()));
        assert_eq!(a.projection_generator(&zero).unwrap(), Some(a.zero()));
        let whole = a.subspace(&a.units());
        assert_eq!(a.idempotent_generator(&whole).unwrap(), Some(a.one()));
    }

    #[test]
    fn not_a_left_ideal() {
        let a = MatrixAlgebra::from_sizes(Q, &[2]);
        let s = a.subspace(&[a.unit(0, 0, 1)]);
        assert!(matches!(a.idempotent_generator(&s), Err(Error::NotALeftIdeal)));
    }

    #[test]
    fn isotropic_row_space_has_no_projection() {
        let f2 = FieldDescriptor::PrimeField(2);
        let a = MatrixAlgebra::from_sizes(f2, &[2]);
        let mut x = a.zero();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            x.blocks[0].set(i, j, Scalar::one(f2));
        }
        let l = a.left_ideal(&[x]);
        assert_eq!(l.dim(), 2);
        assert!(a.idempotent_generator(&l).unwrap().is_some());
        assert_eq!(a.projection_generator(&l).unwrap(), None);
    }

    #[test]
    fn regular_witness() {
        let a = MatrixAlgebra::from_sizes(Q, &[3]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = a.random_element(&mut rng, 0.4);
            let y = a.graded_vn_regular_witness(&x).unwrap().unwrap();
            assert_eq!(a.mul(&a.mul(&x, &y), &x), x);
        }
        assert_eq!(a.graded_vn_regular_witness(&a.zero()).unwrap(), Some(a.zero()));
    }

    #[test]
    fn corners() {
        let a = MatrixAlgebra::from_sizes(Q, &[3]);
        let c = a.corner(&a.one()).unwrap();
        assert_eq!(c.dim(), 9);
        let mut u = a.zero();
        u.blocks[0].set(0, 0, Scalar::one(Q));
        u.blocks[0].set(0, 1, Scalar::one(Q));
        let c = a.corner(&u).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(!c.algebra.star);
        let x = a.mul(
            &a.mul(&u, &a.random_element(&mut ChaCha8Rng::seed_from_u64(1), 0.8)),
            &u,
        );
        assert_eq!(c.embed(&c.restrict(&x)), x);
        assert!(matches!(
            a.corner(&a.scale(&a.scalar(2), &a.one())),
            Err(Error::NotIdempotent)
        ));
    }

    #[test]
    fn probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = MatrixAlgebra::from_sizes(Q, &[2, 1]);
        assert_eq!(a.positive_definite_probe(50, &mut rng), ProbeOutcome::Ok { trials: 50 });
        let f5 = MatrixAlgebra::from_sizes(FieldDescriptor::PrimeField(5), &[2]);
        match f5.positive_definite_probe(1, &mut rng) {
            ProbeOutcome::Counterexample { coefficients, .. } => assert_eq!(coefficients, vec![1, 2]),
            other => panic!("{other:?}"),
        }
    }
}
