//! Packed lower-triangular Cholesky factor with incremental row extension.
//!
//! The factor `L` satisfies `L Lᵀ = A` for a symmetric positive-definite `A`
//! that is built up one row/column at a time. Appending a point costs
//! O(n²); rows are immutable once written, so cloning shares no state and
//! prefix computations (forward solves) never need to be redone.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub(crate) struct CholFactor {
    dim: usize,
    /// Row i occupies entries [i(i+1)/2, i(i+1)/2 + i], i.e. i+1 values.
    data: Vec<f64>,
}

impl CholFactor {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.data[i * (i + 1) / 2 + i]
    }

    /// Forward substitution: solves `L v = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.dim);
        let mut v = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let row = self.row(i);
            let dot: f64 = row[..i].iter().zip(v.iter()).map(|(a, b): (&f64, &f64)| a * b).sum();
            v.push((b[i] - dot) / row[i]);
        }
        v
    }

    /// Backward substitution: solves `Lᵀ x = b`.
    pub fn solve_lower_transpose(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.dim);
        let n = self.dim;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= self.row(j)[i] * x[j];
            }
            x[i] = acc / self.diag(i);
        }
        x
    }

    /// Appends one row given the covariance vector against the existing
    /// points and the new diagonal value. Returns the pivot.
    ///
    /// If the squared pivot is non-positive, `jitter` is added once and the
    /// factorization retried; a second failure is a hard numerical error.
    pub fn extend(&mut self, cov: &[f64], diag_val: f64, jitter: f64) -> Result<f64> {
        let v = self.solve_lower(cov);
        self.extend_with_solved(&v, diag_val, jitter)
    }

    /// Same as [`CholFactor::extend`], but with the forward solve
    /// `v = L⁻¹ cov` already computed by the caller.
    pub fn extend_with_solved(&mut self, v: &[f64], diag_val: f64, jitter: f64) -> Result<f64> {
        debug_assert_eq!(v.len(), self.dim);
        let sumsq: f64 = v.iter().map(|a| a * a).sum();
        let mut pivot2 = diag_val - sumsq;
        if pivot2 <= 0.0 {
            pivot2 += jitter;
            if pivot2 <= 0.0 {
                return Err(Error::Numerical(format!(
                    "factorization pivot non-positive ({pivot2:e}) after jitter at row {}",
                    self.dim
                )));
            }
        }
        let pivot = pivot2.sqrt();
        self.data.extend_from_slice(v);
        self.data.push(pivot);
        self.dim += 1;
        Ok(pivot)
    }

    /// Sum of log pivots, i.e. `(1/2) log det(A)`.
    pub fn log_pivot_sum(&self) -> f64 {
        (0..self.dim).map(|i| self.diag(i).ln()).sum()
    }
}
