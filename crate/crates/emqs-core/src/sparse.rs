//! Minimal sparse matrix kit: COO assembly, CSR storage, and the handful of
//! operations block assembly needs (diagonal scaling, sandwich products,
//! transposes, matrix-vector products).
//!
//! Duplicate COO entries are summed in push order within a (row, col) slot,
//! which keeps assembly reproducible down to the floating-point sum order.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::DMat;
use crate::{Error, Result};

/// Coordinate-format accumulator.
#[derive(Debug, Clone)]
pub struct Coo {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Coo {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Coo { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    /// Adds `scale * m` at block offset (`row_off`, `col_off`).
    pub fn push_csr(&mut self, m: &Csr, row_off: usize, col_off: usize, scale: f64) {
        for r in 0..m.nrows {
            for (c, v) in m.row(r) {
                self.push(row_off + r, col_off + c, scale * v);
            }
        }
    }

    /// Adds `scale * diag(d)` at block offset (`row_off`, `col_off`).
    pub fn push_diag(&mut self, d: &[f64], row_off: usize, col_off: usize, scale: f64) {
        for (i, &v) in d.iter().enumerate() {
            self.push(row_off + i, col_off + i, scale * v);
        }
    }

    /// Identity block.
    pub fn push_eye(&mut self, n: usize, row_off: usize, col_off: usize, scale: f64) {
        for i in 0..n {
            self.push(row_off + i, col_off + i, scale);
        }
    }

    pub fn to_csr(mut self) -> Csr {
        // stable sort keeps push order among duplicates, so the summation
        // order is the push order
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                data.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            indptr[r + 1] += indptr[r];
        }
        Csr { nrows: self.nrows, ncols: self.ncols, indptr, indices, data }
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn eye(n: usize) -> Self {
        Csr {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut coo = Coo::new(d.len(), d.len());
        coo.push_diag(d, 0, 0, 1.0);
        coo.to_csr()
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        self.indices[lo..hi].iter().copied().zip(self.data[lo..hi].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        Ok(y)
    }

    /// `self^T * x` without forming the transpose.
    pub fn t_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, got: x.len() });
        }
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                y[c] += v * x[r];
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> Csr {
        let mut coo = Coo::new(self.ncols, self.nrows);
        for (r, c, v) in self.iter() {
            coo.push(c, r, v);
        }
        coo.to_csr()
    }

    /// Row scaling `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Csr {
        debug_assert_eq!(d.len(), self.nrows);
        let mut coo = Coo::new(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            coo.push(r, c, d[r] * v);
        }
        coo.to_csr()
    }

    /// Sandwich product `self^T * diag(d) * self`.
    ///
    /// Accumulation runs over the rows of `self` in ascending order, so a
    /// from-definition dense evaluation that sums in the same order matches
    /// bit for bit.
    pub fn sandwich(&self, d: &[f64]) -> Csr {
        debug_assert_eq!(d.len(), self.nrows);
        let mut coo = Coo::new(self.ncols, self.ncols);
        for r in 0..self.nrows {
            let row: Vec<(usize, f64)> = self.row(r).collect();
            for &(c1, v1) in &row {
                for &(c2, v2) in &row {
                    coo.push(c1, c2, v1 * d[r] * v2);
                }
            }
        }
        coo.to_csr()
    }

    pub fn matmul(&self, other: &Csr) -> Csr {
        assert_eq!(self.ncols, other.nrows);
        let mut coo = Coo::new(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for (k, v1) in self.row(r) {
                for (c, v2) in other.row(k) {
                    coo.push(r, c, v1 * v2);
                }
            }
        }
        coo.to_csr()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| if libm::fabs(v) > m { libm::fabs(v) } else { m })
    }

    pub fn to_dense(&self) -> DMat {
        let mut m = DMat::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            *m.get_mut(r, c) += v;
        }
        m
    }

    /// `max |A - B|` over the merged sparsity patterns.
    pub fn max_abs_diff(&self, other: &Csr) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut coo = Coo::new(self.nrows, self.ncols);
        coo.push_csr(self, 0, 0, 1.0);
        coo.push_csr(other, 0, 0, -1.0);
        coo.to_csr().max_abs()
    }

    /// Self-adjointness defect `max |A - A^T|`.
    pub fn symmetry_defect(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    /// Skew-adjointness defect `max |A + A^T|`.
    pub fn skew_defect(&self) -> f64 {
        let mut coo = Coo::new(self.nrows, self.ncols);
        coo.push_csr(self, 0, 0, 1.0);
        coo.push_csr(&self.transpose(), 0, 0, 1.0);
        coo.to_csr().max_abs()
    }
}
