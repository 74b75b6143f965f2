//! Small dense matrix kernel.
//!
//! The economic tables in this pipeline are dense and modest in size, so a
//! plain row-major matrix with LU-based inversion is sufficient. Kernels are
//! kept behind this module so they can be swapped for sparse or iterative
//! solvers without touching the accounting logic.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Dimension {
                    axis: format!("row {i}"),
                    expected: n_cols,
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> S {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: S) {
        self.data[row * self.cols + col] = value;
    }

    #[inline]
    pub fn add_to(&mut self, row: usize, col: usize, value: S) {
        self.data[row * self.cols + col] += value;
    }

    pub fn row(&self, row: usize) -> &[S] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[S] {
        &self.data
    }

    pub fn row_sum(&self, row: usize) -> S {
        self.row(row).iter().copied().sum()
    }

    pub fn col_sum(&self, col: usize) -> S {
        (0..self.rows).map(|r| self.get(r, col)).sum()
    }

    pub fn total(&self) -> S {
        self.data.iter().copied().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min_value(&self) -> S {
        self.data
            .iter()
            .copied()
            .fold(S::infinity(), |acc, v| acc.min(v))
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute element-wise difference; matrices must share shape.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }

    pub fn scale(&self, factor: S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| *v * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                axis: "matmul inner".into(),
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Inverse via LU decomposition with partial pivoting.
    pub fn lu_inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                axis: "square matrix".into(),
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut pivots = vec![0usize; n];

        for k in 0..n {
            // pick the largest remaining pivot in column k
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for i in (k + 1)..n {
                let v = lu.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular(format!("zero pivot at column {k}")));
            }
            pivots[k] = p;
            if p != k {
                for j in 0..n {
                    let a = lu.get(k, j);
                    let b = lu.get(p, j);
                    lu.set(k, j, b);
                    lu.set(p, j, a);
                }
            }
            let pivot = lu.get(k, k);
            for i in (k + 1)..n {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                for j in (k + 1)..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }

        // solve A * col_j = e_j for every unit vector
        let mut inv = Self::zeros(n, n);
        let mut work = vec![S::zero(); n];
        for j in 0..n {
            for (i, w) in work.iter_mut().enumerate() {
                *w = if i == j { S::one() } else { S::zero() };
            }
            for (k, &p) in pivots.iter().enumerate() {
                work.swap(k, p);
            }
            for k in 0..n {
                for i in (k + 1)..n {
                    let delta = lu.get(i, k) * work[k];
                    work[i] -= delta;
                }
            }
            for k in (0..n).rev() {
                for i in (k + 1)..n {
                    let delta = lu.get(k, i) * work[i];
                    work[k] -= delta;
                }
                work[k] /= lu.get(k, k);
            }
            for i in 0..n {
                inv.set(i, j, work[i]);
            }
        }
        Ok(inv)
    }
}
