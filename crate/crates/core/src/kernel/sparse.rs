//! Compressed-row complex matrices.
//!
//! Module operators built from commutative groupoid data are extremely sparse
//! (the fiber tensor of `pair(6)` has 216 basis vectors and each leg operator
//! touches at most a handful of them), so the bimodule layer stores actions,
//! Gram tensors and quotient maps in this format. Every constructor sorts its
//! entries, so iteration order and floating-point summation order are fixed.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut map: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            *map.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(map.len());
        let mut values = Vec::with_capacity(map.len());
        for ((r, c), v) in map {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { rows, cols, row_ptr, col_idx, values }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut trip = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trip)
    }

    /// A single column built from a dense vector.
    pub fn column(v: &[C64]) -> Self {
        Self::from_triplets(v.len(), 1, v.iter().enumerate().map(|(i, &x)| (i, 0, x)))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        match self.col_idx[a..b].binary_search(&c) {
            Ok(k) => self.values[a + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out.prune_exact();
        out
    }

    fn prune_exact(&mut self) {
        if self.values.iter().all(|v| v.re != 0.0 || v.im != 0.0) {
            return;
        }
        *self = Self::from_triplets(self.rows, self.cols, self.triplets().collect::<Vec<_>>());
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, s * v))),
        )
    }

    /// `Σ_k coeffs[k] · ops[k]`, skipping exact-zero coefficients.
    pub fn combination(ops: &[Self], coeffs: &[C64], rows: usize, cols: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        let trip = ops
            .iter()
            .zip(coeffs)
            .filter(|(_, &c)| c != zero)
            .flat_map(|(op, &c)| op.triplets().map(move |(r, col, v)| (r, col, c * v)));
        Self::from_triplets(rows, cols, trip)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// Sparse product using a dense accumulator per output row.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        let mut acc = vec![C64::new(0.0, 0.0); other.cols];
        let mut touched = vec![false; other.cols];
        let mut cols_hit: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols_hit.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            cols_hit.sort_unstable();
            for &c in &cols_hit {
                let v = acc[c];
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
                acc[c] = C64::new(0.0, 0.0);
                touched[c] = false;
            }
            cols_hit.clear();
            row_ptr[r + 1] = col_idx.len();
        }
        Self { rows: self.rows, cols: other.cols, row_ptr, col_idx, values }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mat-vec shape mismatch");
        (0..self.rows).map(|r| self.row(r).fold(C64::new(0.0, 0.0), |s, (c, a)| s + a * v[c])).collect()
    }

    pub fn mul_dvec(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_vec(self.mul_vec(v.as_slice()))
    }

    /// Kronecker product; row index of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                trip.push((i * other.rows + k, j * other.cols + l, a * b));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, trip)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Dense submatrix on the given (sorted or unsorted) index lists.
    pub fn dense_block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        let mut col_pos = BTreeMap::new();
        for (p, &c) in cols.iter().enumerate() {
            col_pos.insert(c, p);
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (p, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if let Some(&q) = col_pos.get(&c) {
                    m[(p, q)] = v;
                }
            }
        }
        m
    }

    /// Quadratic form `u^H M v`.
    pub fn form(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.mul_vec(v);
        u.iter().zip(mv.iter()).fold(C64::new(0.0, 0.0), |s, (a, b)| s + a.conj() * b)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Sorted sparse vector used for span computations over operator spaces.
#[derive(Clone, Debug, Default)]
pub struct SparseVec {
    pub entries: Vec<(usize, C64)>,
}

impl SparseVec {
    pub fn from_matrix(m: &SparseMatrix) -> Self {
        let cols = m.ncols();
        Self { entries: m.triplets().map(|(r, c, v)| (r * cols + c, v)).collect() }
    }

    pub fn dot(&self, other: &Self) -> C64 {
        let (mut i, mut j) = (0, 0);
        let mut s = C64::new(0.0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i].0, other.entries[j].0);
            if a == b {
                s += self.entries[i].1.conj() * other.entries[j].1;
                i += 1;
                j += 1;
            } else if a < b {
                i += 1;
            } else {
                j += 1;
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self - s * other`, dropping entries below `drop` in magnitude.
    pub fn sub_scaled(&self, s: C64, other: &Self, drop: f64) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i).map(|e| e.0).unwrap_or(usize::MAX);
            let b = other.entries.get(j).map(|e| e.0).unwrap_or(usize::MAX);
            let (idx, v) = if a == b {
                let v = self.entries[i].1 - s * other.entries[j].1;
                i += 1;
                j += 1;
                (a, v)
            } else if a < b {
                i += 1;
                (a, self.entries[i - 1].1)
            } else {
                j += 1;
                (b, -s * other.entries[j - 1].1)
            };
            if v.norm() > drop {
                out.push((idx, v));
            }
        }
        Self { entries: out }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: self.entries.iter().map(|&(i, v)| (i, v * s)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_matches_dense() {
        let a = DMatrix::from_fn(3, 4, |i, j| c((i + 2 * j) as f64 % 3.0, (i as f64) - 1.0));
        let b = DMatrix::from_fn(4, 2, |i, j| c(j as f64 - (i % 2) as f64, 0.5));
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        let diff = sa.mul(&sb).to_dense() - &a * &b;
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn kron_matches_nalgebra() {
        let a = DMatrix::from_fn(2, 3, |i, j| c(i as f64 + 1.0, j as f64));
        let b = DMatrix::from_fn(3, 2, |i, j| c((i * j) as f64, 1.0));
        let k = SparseMatrix::from_dense(&a).kron(&SparseMatrix::from_dense(&b)).to_dense();
        assert!((k - a.kronecker(&b)).norm() < 1e-14);
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zero() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0)), (1, 0, c(2.0, 0.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), c(2.0, 0.0));
    }

    #[test]
    fn sparse_vec_orthogonalization() {
        let u = SparseVec { entries: vec![(0, c(1.0, 0.0)), (3, c(1.0, 0.0))] };
        let v = SparseVec { entries: vec![(3, c(2.0, 0.0))] };
        let w = u.sub_scaled(c(0.5, 0.0), &v, 1e-15);
        assert_eq!(w.entries, vec![(0, c(1.0, 0.0))]);
        assert!((u.dot(&v) - c(2.0, 0.0)).norm() < 1e-15);
    }
}
