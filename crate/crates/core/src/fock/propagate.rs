//! Adaptive Lanczos propagation of `i d psi/dt = H psi`.
//!
//! Each step projects `H` onto a Krylov space of dimension `m`, exponentiates
//! the tridiagonal projection exactly and estimates the local error from the
//! residual coupling `beta_m |[exp(-i T h)]_{m,1}|`. Rejected steps shrink
//! `h` and reuse the same basis.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::operator::SymmetricOperator;
use crate::fock::tridiag::TridiagonalEigen;
use crate::scalar::Real;

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorOptions<T> {
    /// Local error allowed per accepted step.
    pub tolerance: T,
    /// Krylov dimension.
    pub krylov_dim: usize,
    /// Upper bound on the step size, if any.
    pub max_step: Option<T>,
    /// Smallest step before giving up.
    pub min_step: T,
    /// Allowed `| ||psi|| - 1 |` after a propagation.
    pub norm_bound: T,
    /// Allowed top-shell population after a propagation.
    pub tail_bound: T,
    /// Propagate charge blocks independently (`true`) or the full matrix.
    pub use_blocks: bool,
}

impl<T: Real> Default for PropagatorOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1.0e-12),
            krylov_dim: 30,
            max_step: None,
            min_step: T::lit(1.0e-300).max(T::min_positive_value()),
            norm_bound: T::lit(1.0e-9),
            tail_bound: T::lit(1.0e-8),
            use_blocks: true,
        }
    }
}

/// Work done by one propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

impl std::ops::AddAssign for StepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.accepted += rhs.accepted;
        self.rejected += rhs.rejected;
    }
}

fn dot<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter()
        .zip(y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

fn norm<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Evolves `psi` in place by `duration` under `op`. `start` is only used in
/// error reports.
pub fn evolve<T: Real, Op: SymmetricOperator<T> + ?Sized>(
    op: &Op,
    psi: &mut [Complex<T>],
    start: T,
    duration: T,
    opts: &PropagatorOptions<T>,
) -> Result<StepStats> {
    let dim = op.dim();
    assert_eq!(psi.len(), dim, "state and operator dimensions differ");
    let mut stats = StepStats::default();
    if duration <= T::zero() || dim == 0 {
        return Ok(stats);
    }
    let m_max = opts.krylov_dim.max(2).min(dim);
    let cap = opts.max_step.unwrap_or(duration).min(duration);
    let mut h = cap;
    let mut elapsed = T::zero();
    let zero = Complex::new(T::zero(), T::zero());
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(m_max + 1);
    let mut w = vec![zero; dim];

    while elapsed < duration {
        let remaining = duration - elapsed;
        let beta0 = norm(psi);
        if beta0 == T::zero() {
            break;
        }

        basis.clear();
        basis.push(psi.iter().map(|z| z / beta0).collect());
        let mut alphas: Vec<T> = Vec::with_capacity(m_max);
        let mut betas: Vec<T> = Vec::with_capacity(m_max);
        let mut scale = T::zero();
        let mut exact = false;
        for j in 0..m_max {
            op.apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alphas.push(a);
            // full reorthogonalisation, twice is enough
            for _ in 0..2 {
                for v in basis.iter() {
                    let proj = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi = *wi - vi * proj;
                    }
                }
            }
            let b = norm(&w);
            scale = scale.max(a.abs() + b);
            if j + 1 == dim || b <= T::lit(64.0) * T::epsilon() * scale.max(T::min_positive_value()) {
                exact = true;
                break;
            }
            betas.push(b);
            if j + 1 < m_max {
                basis.push(w.iter().map(|z| z / b).collect());
            }
        }

        let m = alphas.len();
        let residual = if exact { T::zero() } else { betas[m - 1] };
        let eig = TridiagonalEigen::new(&alphas, &betas[..m - 1]);

        let coefficients = |step: T| -> Vec<Complex<T>> {
            let phases: Vec<Complex<T>> = (0..m)
                .map(|l| Complex::from_polar(eig.vector(0, l), -eig.values[l] * step))
                .collect();
            (0..m)
                .map(|k| {
                    (0..m).fold(Complex::new(T::zero(), T::zero()), |acc, l| {
                        acc + phases[l] * eig.vector(k, l)
                    })
                })
                .collect()
        };

        let mut step = if exact { remaining } else { h.min(remaining) };
        let (y, err) = loop {
            let y = coefficients(step);
            let err = residual * y[m - 1].norm() * beta0;
            if err <= opts.tolerance {
                break (y, err);
            }
            stats.rejected += 1;
            let shrink = T::lit(0.9) * (opts.tolerance / err).powf(T::one() / T::count(m));
            step = step * shrink.max(T::lit(0.1)).min(T::lit(0.9));
            if step < opts.min_step {
                return Err(Error::StepUnderflow {
                    t: (start + elapsed).to_f64().unwrap_or(f64::NAN),
                    step: step.to_f64().unwrap_or(0.0),
                });
            }
        };

        for (i, out) in psi.iter_mut().enumerate() {
            *out = (0..m).fold(zero, |acc, k| acc + basis[k][i] * y[k]) * beta0;
        }
        stats.accepted += 1;

        if step >= remaining {
            break;
        }
        elapsed = elapsed + step;
        let grow = if err > T::zero() {
            T::lit(0.9) * (opts.tolerance / err).powf(T::one() / T::count(m))
        } else {
            T::lit(4.0)
        };
        h = (step * grow.max(T::one()).min(T::lit(4.0))).min(cap);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::Tridiagonal;
    use nalgebra::{DMatrix, SymmetricEigen};

    /// exp(-i A t) x via dense eigendecomposition.
    fn dense_reference(t: &Tridiagonal<f64>, x: &[Complex<f64>], time: f64) -> Vec<Complex<f64>> {
        let n = t.diag.len();
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.diag[i]
            } else if i + 1 == j {
                t.off[i]
            } else if j + 1 == i {
                t.off[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(a);
        let mut out = vec![Complex::new(0.0, 0.0); n];
        for l in 0..n {
            let v = eig.eigenvectors.column(l);
            let c: Complex<f64> = (0..n).map(|k| x[k] * v[k]).sum();
            let ph = Complex::from_polar(1.0, -eig.eigenvalues[l] * time);
            for k in 0..n {
                out[k] += c * ph * v[k];
            }
        }
        out
    }

    fn chain(n: usize) -> Tridiagonal<f64> {
        Tridiagonal {
            diag: (0..n).map(|i| 50.0 * i as f64).collect(),
            off: (0..n - 1).map(|i| 3.0 * ((i + 1) as f64).sqrt()).collect(),
        }
    }

    #[test]
    fn matches_dense_exponential() {
        let op = chain(80);
        let mut psi: Vec<Complex<f64>> = (0..80)
            .map(|i| Complex::new((-(i as f64 - 10.0).powi(2) / 20.0).exp(), 0.1 * i as f64 / 80.0))
            .collect();
        let n0 = norm(&psi);
        psi.iter_mut().for_each(|z| *z /= n0);
        let reference = dense_reference(&op, &psi, 0.37);
        let opts = PropagatorOptions {
            krylov_dim: 12,
            ..Default::default()
        };
        let stats = evolve(&op, &mut psi, 0.0, 0.37, &opts).unwrap();
        assert!(stats.accepted > 1);
        let err: f64 = psi.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err:e}");
        assert!((norm(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_duration_is_identity() {
        let op = chain(5);
        let mut psi = vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8), Complex::default(), Complex::default(), Complex::default()];
        let before = psi.clone();
        evolve(&op, &mut psi, 0.0, 0.0, &PropagatorOptions::default()).unwrap();
        assert_eq!(psi, before);
    }

    #[test]
    fn underflow_is_reported() {
        let op = chain(80);
        let mut psi = vec![Complex::new(0.0, 0.0); 80];
        psi[10] = Complex::new(1.0, 0.0);
        let opts = PropagatorOptions {
            krylov_dim: 3,
            tolerance: 1e-300,
            min_step: 1e-6,
            ..Default::default()
        };
        let err = evolve(&op, &mut psi, 0.0, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }
}
