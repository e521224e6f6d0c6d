//! Eigen-decomposition of small real symmetric tridiagonal matrices
//! (implicit QL with Wilkinson shifts, the classic `tql2`).

use crate::scalar::Real;

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen<T> {
    pub values: Vec<T>,
    /// Row-major `n x n`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<T>,
    n: usize,
}

impl<T: Real> TridiagonalEigen<T> {
    /// `diag` has length `n`, `off` length `n - 1` (entry `i` couples `i` and `i + 1`).
    pub fn new(diag: &[T], off: &[T]) -> Self {
        let n = diag.len();
        assert!(n > 0 && off.len() + 1 == n, "tridiagonal shape mismatch");
        let mut d = diag.to_vec();
        let mut e: Vec<T> = off.iter().copied().chain(std::iter::once(T::zero())).collect();
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        tql2(&mut d, &mut e, &mut z, n);
        Self {
            values: d,
            vectors: z,
            n,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Component `row` of eigenvector `col`.
    pub fn vector(&self, row: usize, col: usize) -> T {
        self.vectors[row * self.n + col]
    }
}

fn tql2<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T], n: usize) {
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
}
