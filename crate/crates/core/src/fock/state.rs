use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::hamiltonian::Hamiltonian;
use crate::fock::propagate::{evolve, PropagatorOptions, StepStats};
use crate::fock::space::{poisson_tail, FockSpace};
use crate::scalar::{sqrt_falling, Real};

/// Largest truncated tail of the initial coherent product state.
pub const COHERENT_TAIL_BOUND: f64 = 1.0e-10;

/// Amplitudes over a [`FockSpace`] at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    space: Arc<FockSpace>,
    amplitudes: Vec<Complex<T>>,
    time: T,
}

/// Block index, evolved block amplitudes and step statistics.
type BlockResult<T> = (usize, Vec<Complex<T>>, StepStats);

impl<T: Real> StateVector<T> {
    pub fn from_amplitudes(space: Arc<FockSpace>, amplitudes: Vec<Complex<T>>, time: T) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::InvalidCutoff(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                space.dimension()
            )));
        }
        Ok(Self {
            space,
            amplitudes,
            time,
        })
    }

    /// Product coherent state `|alpha> (x) |beta>` at `t = 0`, renormalised once
    /// after truncation.
    pub fn coherent(space: Arc<FockSpace>, alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let mean_a = alpha.norm_sqr().to_f64().unwrap_or(f64::INFINITY);
        let mean_b = beta.norm_sqr().to_f64().unwrap_or(f64::INFINITY);
        if !(mean_a.is_finite() && mean_b.is_finite()) {
            return Err(Error::InvalidParams("coherent amplitudes must be finite".into()));
        }
        let tail_a = poisson_tail(mean_a, space.cutoff_a() + 1);
        let tail_b = poisson_tail(mean_b, space.cutoff_b() + 1);
        let tail = tail_a + tail_b - tail_a * tail_b;
        if tail > COHERENT_TAIL_BOUND {
            return Err(Error::CutoffTooSmall {
                tail,
                bound: COHERENT_TAIL_BOUND,
            });
        }
        let ca = coherent_factors(alpha, space.cutoff_a());
        let cb = coherent_factors(beta, space.cutoff_b());
        let mut amplitudes = Vec::with_capacity(space.dimension());
        for a in &ca {
            for b in &cb {
                amplitudes.push(a * b);
            }
        }
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        amplitudes.iter_mut().for_each(|z| *z = *z / n);
        Ok(Self {
            space,
            amplitudes,
            time: T::zero(),
        })
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Probability on states with `n_a >= cutoff_a - 2` or `n_b >= cutoff_b - 2`.
    pub fn top_shell_population(&self) -> T {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.is_top_shell(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// `<n_a + 2 n_b>`.
    pub fn mean_charge(&self) -> T {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let (na, nb) = self.space.occupations(i);
                z.norm_sqr() * T::count(na + 2 * nb)
            })
            .sum()
    }

    /// `<psi| H |psi>`.
    pub fn energy(&self, h: &Hamiltonian<T>) -> Result<T> {
        let n = self.moment(1, 1, 0, 0)?.re;
        let pair = self.moment(2, 0, 0, 1)?;
        Ok(h.delta() / T::lit(2.0) * n + h.omega() * pair.re)
    }

    /// `<psi| (a^dag)^p a^q (b^dag)^r b^s |psi>`.
    ///
    /// Evaluated as `<a^p b^r psi | a^q b^s psi>`; lowering never leaves the
    /// truncated space, so no truncation artefact enters beyond the state itself.
    pub fn moment(&self, p: usize, q: usize, r: usize, s: usize) -> Result<Complex<T>> {
        let (ca, cb) = (self.space.cutoff_a(), self.space.cutoff_b());
        if p.max(q) > ca || r.max(s) > cb {
            return Err(Error::Headroom {
                p,
                q,
                r,
                s,
                cutoff_a: ca,
                cutoff_b: cb,
            });
        }
        let ha = p.max(q);
        let hb = r.max(s);
        let mut acc = Complex::new(T::zero(), T::zero());
        for na in 0..=(ca - ha) {
            let wa = sqrt_falling::<T>(na + p, p) * sqrt_falling::<T>(na + q, q);
            for nb in 0..=(cb - hb) {
                let left = self.amplitudes[self.space.index(na + p, nb + r)];
                let right = self.amplitudes[self.space.index(na + q, nb + s)];
                if right.norm_sqr() == T::zero() || left.norm_sqr() == T::zero() {
                    continue;
                }
                let wb = sqrt_falling::<T>(nb + r, r) * sqrt_falling::<T>(nb + s, s);
                acc = acc + left.conj() * right * (wa * wb);
            }
        }
        Ok(acc)
    }

    /// Evolves to `t_target` under `h`.
    ///
    /// The norm is never renormalised; drift beyond `opts.norm_bound` and
    /// top-shell population beyond `opts.tail_bound` are errors.
    pub fn propagate(&self, h: &Hamiltonian<T>, t_target: T, opts: &PropagatorOptions<T>) -> Result<(Self, StepStats)> {
        if t_target < self.time {
            return Err(Error::BackwardsInTime {
                target: t_target.to_f64().unwrap_or(f64::NAN),
                current: self.time.to_f64().unwrap_or(f64::NAN),
            });
        }
        assert!(
            Arc::ptr_eq(&self.space, h.space()) || *self.space == **h.space(),
            "state and Hamiltonian live on different spaces"
        );
        let duration = t_target - self.time;
        let mut next = self.clone();
        next.time = t_target;
        if duration == T::zero() {
            return Ok((next, StepStats::default()));
        }

        let mut stats = StepStats::default();
        if opts.use_blocks {
            let results: Vec<Result<BlockResult<T>>> = self
                .space
                .blocks()
                .par_iter()
                .zip(h.blocks().par_iter())
                .enumerate()
                .filter_map(|(b, (block, tri))| {
                    let mut sub: Vec<Complex<T>> =
                        block.indices.iter().map(|&i| self.amplitudes[i]).collect();
                    if sub.iter().all(|z| z.norm_sqr() == T::zero()) {
                        return None;
                    }
                    Some(evolve(tri, &mut sub, self.time, duration, opts).map(|s| (b, sub, s)))
                })
                .collect();
            for res in results {
                let (b, sub, s) = res?;
                for (&i, z) in self.space.blocks()[b].indices.iter().zip(sub) {
                    next.amplitudes[i] = z;
                }
                stats += s;
            }
        } else {
            stats = evolve(h.full(), &mut next.amplitudes, self.time, duration, opts)?;
        }

        let t = t_target.to_f64().unwrap_or(f64::NAN);
        let drift = (next.norm() - T::one()).abs();
        if drift > opts.norm_bound {
            return Err(Error::NormDrift {
                t,
                drift: drift.to_f64().unwrap_or(f64::NAN),
                bound: opts.norm_bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        let population = next.top_shell_population();
        if population > opts.tail_bound {
            return Err(Error::CutoffExhausted {
                t,
                population: population.to_f64().unwrap_or(f64::NAN),
                bound: opts.tail_bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((next, stats))
    }
}

/// `exp(-|z|^2 / 2) z^n / sqrt(n!)` for `n = 0..=cutoff`, built in log space
/// so large amplitudes do not underflow the prefactor.
fn coherent_factors<T: Real>(z: Complex<T>, cutoff: usize) -> Vec<Complex<T>> {
    let half = T::lit(0.5);
    let mean = z.norm_sqr();
    if mean == T::zero() {
        let mut out = vec![Complex::new(T::zero(), T::zero()); cutoff + 1];
        out[0] = Complex::new(T::one(), T::zero());
        return out;
    }
    let ln_r = mean.ln() * half;
    let theta = z.arg();
    let mut ln_fact = T::zero();
    (0..=cutoff)
        .map(|n| {
            if n > 0 {
                ln_fact = ln_fact + T::count(n).ln();
            }
            let nn = T::count(n);
            let magnitude = (-mean * half + nn * ln_r - ln_fact * half).exp();
            Complex::from_polar(magnitude, nn * theta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::space::CutoffPolicy;
    use crate::model::SystemParams;

    fn setup(alpha: f64, beta: f64) -> (SystemParams<f64>, Arc<FockSpace>, Hamiltonian<f64>) {
        let p = SystemParams::real(100.0, 1.0e4, alpha, beta).unwrap();
        let space = Arc::new(FockSpace::build(&p, CutoffPolicy::Auto).unwrap());
        let h = Hamiltonian::new(&p, space.clone()).unwrap();
        (p, space, h)
    }

    #[test]
    fn coherent_means() {
        let (_, space, _) = setup(0.0, 0.0);
        let a = Complex::new(1.5f64, -0.5);
        let b = Complex::new(-0.3, 0.8);
        let space = Arc::new(FockSpace::new(space.cutoff_a() + 20, space.cutoff_b() + 20).unwrap());
        let s: StateVector<f64> = StateVector::coherent(space, a, b).unwrap();
        assert!((s.moment(0, 0, 0, 0).unwrap().re - 1.0).abs() < 1e-12);
        assert!((s.moment(1, 1, 0, 0).unwrap().re - a.norm_sqr()).abs() < 1e-9);
        assert!((s.moment(0, 1, 0, 0).unwrap() - a).norm() < 1e-9);
        assert!((s.moment(0, 0, 0, 1).unwrap() - b).norm() < 1e-9);
        assert!((s.moment(0, 2, 0, 1).unwrap() - a * a * b).norm() < 1e-9);
    }

    #[test]
    fn vacuum_is_stationary() {
        let (p, space, h) = setup(0.0, 0.0);
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));
        let (next, _) = s.propagate(&h, 1e-3, &PropagatorOptions::default()).unwrap();
        assert!((next.amplitudes()[0] - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn conserves_norm_charge_energy() {
        let (p, space, h) = setup(2.0, 1.0);
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let (k0, e0) = (s.mean_charge(), s.energy(&h).unwrap());
        let (next, stats) = s.propagate(&h, p.rescale(0.3), &PropagatorOptions::default()).unwrap();
        assert!(stats.accepted > 0);
        assert!((next.norm() - 1.0).abs() < 1e-9);
        assert!((next.mean_charge() - k0).abs() < 1e-8);
        assert!((next.energy(&h).unwrap() - e0).abs() < 1e-8);
    }

    #[test]
    fn blocks_match_full_matrix() {
        let p = SystemParams::real(100.0, 1.0e4, 1.0, 0.5).unwrap();
        let space = Arc::new(FockSpace::new(12, 8).unwrap());
        let h = Hamiltonian::new(&p, space.clone()).unwrap();
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let opts = PropagatorOptions {
            tail_bound: 1.0,
            ..Default::default()
        };
        let full = PropagatorOptions {
            use_blocks: false,
            ..opts
        };
        let (a, _) = s.propagate(&h, 2e-3, &opts).unwrap();
        let (b, _) = s.propagate(&h, 2e-3, &full).unwrap();
        let diff = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn halved_step_self_convergence() {
        let (p, space, h) = setup(2.0, 1.0);
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let t = p.rescale(0.1);
        let step = t / 40.0;
        let run = |max_step: f64| {
            let opts = PropagatorOptions {
                max_step: Some(max_step),
                ..Default::default()
            };
            s.propagate(&h, t, &opts).unwrap().0.moment(1, 1, 0, 0).unwrap().re
        };
        let tol = PropagatorOptions::<f64>::default().tolerance;
        assert!((run(step) - run(step / 2.0)).abs() < 10.0 * tol);
    }

    #[test]
    fn rejects_small_cutoff() {
        let space = Arc::new(FockSpace::new(6, 6).unwrap());
        let err = StateVector::coherent(space, Complex::new(2.0, 0.0), Complex::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }));
    }

    #[test]
    fn detects_exhausted_cutoff() {
        let p = SystemParams::real(100.0, 100.0, 2.0, 0.0).unwrap();
        let space = Arc::new(FockSpace::new(28, 3).unwrap());
        let h = Hamiltonian::new(&p, space.clone()).unwrap();
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let err = s.propagate(&h, 0.05, &PropagatorOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CutoffExhausted { .. }), "{err}");
    }

    #[test]
    fn moment_headroom() {
        let space = Arc::new(FockSpace::new(3, 2).unwrap());
        let s = StateVector::coherent(space, Complex::new(0.01, 0.0), Complex::new(0.0, 0.0)).unwrap();
        assert!(matches!(s.moment(4, 4, 0, 0), Err(Error::Headroom { .. })));
        assert!(s.moment(3, 3, 2, 2).is_ok());
    }

    #[test]
    fn backwards_in_time() {
        let (p, space, h) = setup(0.5, 0.0);
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let (later, _) = s.propagate(&h, 1e-4, &PropagatorOptions::default()).unwrap();
        assert!(matches!(
            later.propagate(&h, 0.0, &PropagatorOptions::default()),
            Err(Error::BackwardsInTime { .. })
        ));
    }

    #[test]
    fn large_amplitude_factors_do_not_underflow() {
        let f = coherent_factors(Complex::new(30.0f64, 0.0), 1200);
        let mass: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        assert!((mass - 1.0).abs() < 1e-10);
    }
}
