//! Small dense linear algebra over a [`Field`] by Gaussian elimination.

use crate::ff::{Field, FieldElem};

pub type Matrix = Vec<Vec<FieldElem>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(f: &Field, rows: &mut Matrix) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = f.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c];
            let pivot_row = rows[r].clone();
            for (x, &y) in rows[i].iter_mut().zip(&pivot_row) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(f: &Field, vectors: &[Vec<FieldElem>]) -> usize {
    let mut rows = vectors.to_vec();
    row_reduce(f, &mut rows).len()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert(f: &Field, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// A basis of `{v : rows * v = 0}`.
pub fn nullspace(f: &Field, rows: &[Vec<FieldElem>], cols: usize) -> Vec<Vec<FieldElem>> {
    let mut red = rows.to_vec();
    let pivots = row_reduce(f, &mut red);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red[r][fc]);
            }
            v
        })
        .collect()
}

pub fn mat_vec(f: &Field, m: &Matrix, v: &[FieldElem]) -> Vec<FieldElem> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
        })
        .collect()
}

pub fn dot(f: &Field, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter()
        .zip(b)
        .fold(f.zero(), |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}
