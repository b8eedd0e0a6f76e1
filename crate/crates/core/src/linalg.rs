//! Sparse exact rational matrices.
//!
//! Ranks use fraction-free (Bareiss) elimination on rows cleared of
//! denominators; kernels and coordinate solves use rational reduced row
//! echelon form. Both are exact.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Integer, One, Zero};

use crate::graded::{fmt_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseRationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseRationalMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Builds a matrix from its columns given as sparse `(row, value)` lists.
    pub fn from_columns(rows: usize, columns: &[Vec<(usize, Scalar)>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                m.add_to(*i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Scalar> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for ((i, j), v) in &self.entries {
            d[*i][*j] = v.clone();
        }
        d
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        SparseRationalMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|((i, j), v)| ((*j, *i), v.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for ((k, j), v) in &other.entries {
            by_row.entry(*k).or_default().push((*j, v));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for ((i, k), a) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (j, b) in row {
                    out.add_to(*i, *j, &(a * *b));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.rows];
        for ((i, j), a) in &self.entries {
            out[*i] += a * &v[*j];
        }
        out
    }

    /// Rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        if self.entries.is_empty() {
            return 0;
        }
        rank_bareiss(integer_rows(&self.to_dense()))
    }

    /// Basis of the null space, one vector per free column of the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = rref(self.to_dense(), self.cols);
        let mut basis = Vec::new();
        let pivot_of: BTreeMap<usize, usize> = pivots.iter().enumerate().map(|(row, c)| (*c, row)).collect();
        for free in (0..self.cols).filter(|c| !pivot_of.contains_key(c)) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (c, row) in &pivot_of {
                v[*c] = -r[*row][free].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Display for SparseRationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_scalar(&self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Scales each row by the lcm of its denominators.
pub fn integer_rows(rows: &[Vec<Scalar>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
        })
        .collect()
}

/// Bareiss fraction-free elimination; every division is exact.
pub fn rank_bareiss(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Reduced row echelon form of the first `cols` columns; returns the reduced
/// rows and the pivot column of each nonzero row.
pub fn rref(mut m: Vec<Vec<Scalar>>, cols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Rank of a family of vectors of equal length.
pub fn rank_of_vectors(vectors: &[Vec<Scalar>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank_bareiss(integer_rows(vectors))
}

/// Indices of a maximal linearly independent subfamily, chosen greedily in
/// order (the pivot columns of the matrix whose columns are the vectors).
pub fn independent_subset(vectors: &[Vec<Scalar>]) -> Vec<usize> {
    let Some(first) = vectors.first() else { return Vec::new() };
    let rows: Vec<Vec<Scalar>> =
        (0..first.len()).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
    rref(rows, vectors.len()).1
}

/// Coordinates of `target` in the given basis vectors, or `None` when it is
/// not in their span. The basis must be linearly independent.
pub fn solve_in_basis(basis: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = target.len();
    let k = basis.len();
    // Augmented system: rows are coordinates, columns basis vectors + rhs.
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let (r, pivots) = rref(rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Scalar::zero(); k];
    for (row, c) in pivots.iter().enumerate() {
        x[*c] = r[row][k].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{int, ratio};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> SparseRationalMatrix {
        let data: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|v| int(*v)).collect()).collect();
        SparseRationalMatrix::from_dense(rows.len(), rows[0].len(), &data)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[0, 0, 1], &[0, 1, 0], &[0, 1, 1]]).rank(), 2);
        assert_eq!(SparseRationalMatrix::zeros(3, 4).rank(), 0);
        let mut q = SparseRationalMatrix::zeros(2, 2);
        q.set(0, 0, ratio(1, 2));
        q.set(1, 1, ratio(-2, 3));
        assert_eq!(q.rank(), 2);
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(a.apply(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_roundtrip() {
        let basis = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        let x = solve_in_basis(&basis, &[int(2), int(3), int(5)]).unwrap();
        assert_eq!(x, vec![int(2), int(3)]);
        assert!(solve_in_basis(&basis, &[int(1), int(0), int(0)]).is_none());
    }

    proptest! {
        #[test]
        fn bareiss_matches_rref(data in proptest::collection::vec(-3i64..=3, 20)) {
            let rows: Vec<Vec<Scalar>> = data.chunks(5).map(|c| c.iter().map(|v| ratio(*v, 1 + v.abs())).collect()).collect();
            let a = SparseRationalMatrix::from_dense(4, 5, &rows);
            let (_, pivots) = rref(rows.clone(), 5);
            prop_assert_eq!(a.rank(), pivots.len());
            prop_assert_eq!(a.kernel_basis().len(), 5 - pivots.len());
            prop_assert_eq!(a.transpose().rank(), a.rank());
        }
    }
}
