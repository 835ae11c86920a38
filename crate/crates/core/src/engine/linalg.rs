//! Dense exact elimination over [`Scalar`].

use crate::classifier::FieldDescriptor;

use super::scalar::Scalar;

pub type Row = Vec<Scalar>;

/// Bring `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(rows: &mut Vec<Row>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        if !inv.is_one() {
            for x in rows[r][c..].iter_mut() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Row], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` in reduced row echelon form.
pub fn nullspace(rows: &[Row], ncols: usize, field: FieldDescriptor) -> Vec<Row> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(field); ncols];
        v[free] = Scalar::one(field);
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -&row[free];
        }
        basis.push(v);
    }
    rref(&mut basis, ncols);
    basis
}

/// A solution of `A x = b`, free variables set to zero, or `None`.
pub fn solve(a: &[Row], b: &[Scalar], ncols: usize, field: FieldDescriptor) -> Option<Vec<Scalar>> {
    let mut m: Vec<Row> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(field); ncols];
    for (row, &p) in m.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Reduce `v` against an RREF basis; zero iff `v` lies in its span.
pub fn reduce(basis: &[Row], pivots: &[usize], v: &Row) -> Row {
    let mut v = v.clone();
    for (row, &p) in basis.iter().zip(pivots) {
        if v[p].is_zero() {
            continue;
        }
        let f = v[p].clone();
        for (x, y) in v.iter_mut().zip(row) {
            if !y.is_zero() {
                *x = &*x - &(&f * y);
            }
        }
    }
    v
}

/// Pivot columns of a matrix already in RREF.
pub fn pivots_of(rref_rows: &[Row]) -> Vec<usize> {
    rref_rows
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("no zero rows in RREF"))
        .collect()
}
