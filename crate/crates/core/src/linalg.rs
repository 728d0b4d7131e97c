//! Exact linear algebra over the rationals: fraction-free elimination with
//! deterministic pivoting, ranks, nullspaces, and inverses.
//!
//! Rows are cleared to integers and gcd-normalized after every combination,
//! which keeps entries small on the structured systems arising from
//! Chevalley-Eilenberg differentials and constrained jet solves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Ratio;
use crate::error::{Error, Result};

/// Dense column-major-free rational matrix for small fibers and propagators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Ratio>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Ratio::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Ratio::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Ratio) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
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

    pub fn get(&self, i: usize, j: usize) -> &Ratio {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ratio) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn scalar_mul(&self, c: &Ratio) -> QMatrix {
        QMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn matmul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        QMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Ratio::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc += a * rhs.get(k, j);
                }
            }
            acc
        })
    }

    pub fn rank(&self) -> usize {
        SparseMat::from_dense(self).rank()
    }

    pub fn nullspace(&self) -> Vec<Vec<Ratio>> {
        SparseMat::from_dense(self).nullspace()
    }

    /// Exact inverse via Gauss-Jordan; errors on a singular matrix.
    pub fn inverse(&self) -> Result<QMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or_else(|| Error::Domain("singular matrix".into()))?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(pivot, j).clone();
                    a.set(pivot, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.get(pivot, j).clone();
                    inv.set(pivot, j, inv.get(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let p = a.get(col, col).clone();
            let p_inv = p.recip()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j) * &p_inv);
                inv.set(col, j, inv.get(col, j) * &p_inv);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &(&factor * a.get(col, j));
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &(&factor * inv.get(col, j));
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    /// Determinant sign test used for positive-definiteness: all leading
    /// principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut a = self.clone();
        let n = self.rows;
        // Symmetric Gaussian elimination; pivots must stay positive.
        for k in 0..n {
            let p = a.get(k, k).clone();
            if !p.is_positive() {
                return false;
            }
            for i in (k + 1)..n {
                let f = a.get(i, k) / &p;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - &(&f * a.get(k, j));
                    a.set(i, j, v);
                }
            }
        }
        true
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

/// Sparse integer row used inside the elimination: column -> coefficient,
/// gcd-normalized (row scaling does not affect ranks or nullspaces).
type IntRow = BTreeMap<usize, BigInt>;

fn normalize_row(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return;
    }
    let leading_negative = row.values().next().map(|v| v.is_negative()).unwrap_or(false);
    if leading_negative {
        g = -g;
    }
    if !g.is_one() || leading_negative {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

/// Sparse rational matrix. Rows store exact values (so `apply` is faithful);
/// elimination works on integer-cleared copies.
#[derive(Clone, Debug)]
pub struct SparseMat {
    cols: usize,
    rows: Vec<BTreeMap<usize, Ratio>>,
}

impl SparseMat {
    pub fn new(cols: usize) -> Self {
        SparseMat { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a row; duplicate column entries accumulate. Empty rows are
    /// kept so row indices stay faithful under `apply`.
    pub fn push_row(&mut self, entries: &[(usize, Ratio)]) {
        let mut row: BTreeMap<usize, Ratio> = BTreeMap::new();
        for (c, v) in entries {
            debug_assert!(*c < self.cols);
            if v.is_zero() {
                continue;
            }
            let e = row.entry(*c).or_insert_with(Ratio::zero);
            *e += v.clone();
            if e.is_zero() {
                row.remove(c);
            }
        }
        self.rows.push(row);
    }

    pub fn from_dense(m: &QMatrix) -> Self {
        let mut s = SparseMat::new(m.cols());
        for i in 0..m.rows() {
            let entries: Vec<(usize, Ratio)> = (0..m.cols())
                .filter(|&j| !m.get(i, j).is_zero())
                .map(|j| (j, m.get(i, j).clone()))
                .collect();
            s.push_row(&entries);
        }
        s
    }

    pub fn to_dense(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                m.set(i, *j, v.clone());
            }
        }
        m
    }

    /// Applies the matrix to a rational vector.
    pub fn apply(&self, x: &[Ratio]) -> Vec<Ratio> {
        assert_eq!(x.len(), self.cols);
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Ratio::zero();
                for (j, v) in row {
                    if !x[*j].is_zero() {
                        acc += v * &x[*j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Integer-cleared copies of the rows for elimination.
    fn integer_rows(&self) -> Vec<IntRow> {
        self.rows
            .iter()
            .map(|row| {
                let mut lcm = BigInt::from(1);
                for v in row.values() {
                    lcm = lcm.lcm(v.denom());
                }
                let mut out = IntRow::new();
                for (c, v) in row {
                    let scaled = v.numer() * (&lcm / v.denom());
                    if !scaled.is_zero() {
                        out.insert(*c, scaled);
                    }
                }
                normalize_row(&mut out);
                out
            })
            .collect()
    }

    /// Row echelon form. Returns the echelon rows and their pivot columns.
    /// Deterministic: columns are processed in ascending order; among rows
    /// whose leading column matches, the sparsest (ties by arrival order) is
    /// the pivot. Rows are bucketed by leading column so each row is only
    /// touched when its leading column comes up.
    fn echelon(&self) -> (Vec<IntRow>, Vec<usize>) {
        let mut buckets: BTreeMap<usize, Vec<IntRow>> = BTreeMap::new();
        for row in self.integer_rows() {
            if let Some((&lead, _)) = row.iter().next() {
                buckets.entry(lead).or_default().push(row);
            }
        }
        let mut echelon: Vec<IntRow> = Vec::new();
        let mut pivot_cols: Vec<usize> = Vec::new();

        while let Some((col, mut rows)) = buckets.pop_first() {
            let mut best = 0;
            for (i, row) in rows.iter().enumerate() {
                if row.len() < rows[best].len() {
                    best = i;
                }
            }
            let pivot_row = rows.swap_remove(best);
            let p = pivot_row.get(&col).cloned().expect("pivot entry");
            for row in rows.into_iter() {
                let v = row.get(&col).cloned().expect("bucketed row leads at col");
                let g = p.gcd(&v);
                let row_scale = &p / &g;
                let piv_scale = &v / &g;
                let mut out = IntRow::new();
                for (c, a) in row.iter() {
                    out.insert(*c, a * &row_scale);
                }
                for (c, b) in pivot_row.iter() {
                    let e = out.entry(*c).or_insert_with(BigInt::zero);
                    *e -= b * &piv_scale;
                }
                out.retain(|_, v| !v.is_zero());
                normalize_row(&mut out);
                if let Some((&lead, _)) = out.iter().next() {
                    debug_assert!(lead > col);
                    buckets.entry(lead).or_default().push(out);
                }
            }
            echelon.push(pivot_row);
            pivot_cols.push(col);
        }
        (echelon, pivot_cols)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Basis of the right nullspace as rational vectors.
    pub fn nullspace(&self) -> Vec<Vec<Ratio>> {
        let (echelon, pivot_cols) = self.echelon();
        let pivot_set: BTreeMap<usize, usize> =
            pivot_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let free_cols: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_set.contains_key(c)).collect();

        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut x = vec![Ratio::zero(); self.cols];
            x[fc] = Ratio::one();
            // Back-substitute pivots from the bottom of the echelon up.
            for i in (0..echelon.len()).rev() {
                let pc = pivot_cols[i];
                let row = &echelon[i];
                let mut acc = Ratio::zero();
                for (&c, v) in row {
                    if c == pc {
                        continue;
                    }
                    if !x[c].is_zero() {
                        acc += &Ratio::from_bigint(v.clone()) * &x[c];
                    }
                }
                let p = Ratio::from_bigint(row[&pc].clone());
                x[pc] = -acc / p;
            }
            basis.push(x);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        // [1 2 3; 2 4 6; 1 0 1] has rank 2.
        let m = QMatrix::from_fn(3, 3, |i, j| {
            let vals = [[1, 2, 3], [2, 4, 6], [1, 0, 1]];
            Ratio::from_int(vals[i][j])
        });
        assert_eq!(m.rank(), 2);
        let null = m.nullspace();
        assert_eq!(null.len(), 1);
        // Verify A x = 0.
        let s = SparseMat::from_dense(&m);
        for x in &null {
            assert!(s.apply(x).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_fn(2, 2, |i, j| {
            let vals = [[q(1, 1), q(1, 2)], [q(1, 3), q(1, 4)]];
            vals[i][j].clone()
        });
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), QMatrix::identity(2));
        let singular = QMatrix::from_fn(2, 2, |_, _| Ratio::one());
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn positive_definite_test() {
        let pd = QMatrix::from_fn(2, 2, |i, j| if i == j { Ratio::from_int(2) } else { Ratio::one() });
        assert!(pd.is_positive_definite());
        let not_pd = QMatrix::from_fn(2, 2, |i, j| if i == j { Ratio::one() } else { Ratio::from_int(3) });
        assert!(!not_pd.is_positive_definite());
    }
}
