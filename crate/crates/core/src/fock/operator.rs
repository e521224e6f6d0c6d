use num_complex::Complex;

use crate::scalar::Real;

/// Real symmetric operator acting on complex vectors.
pub trait SymmetricOperator<T: Real>: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]);
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<T>,
}

impl<T: Real> SymmetricOperator<T> for Tridiagonal<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut acc = x[i] * self.diag[i];
            if i > 0 {
                acc = acc + x[i - 1] * self.off[i - 1];
            }
            if i + 1 < n {
                acc = acc + x[i + 1] * self.off[i];
            }
            y[i] = acc;
        }
    }
}

/// Compressed sparse row matrix with real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut rows: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet out of range");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                let last = vals.len() - 1;
                vals[last] = vals[last] + v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|&(col, _)| col == c)
            .map_or(T::zero(), |(_, v)| v)
    }

    /// Largest `|A_rc - A_cr|`.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }
}

impl<T: Real> SymmetricOperator<T> for SparseMatrix<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (c, v) in self.row(r) {
                acc = acc + x[c] * v;
            }
            *yr = acc;
        }
    }
}
