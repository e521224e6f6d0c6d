//! Witnesses from their defining moments on an evolved state.
//!
//! Heisenberg-picture expectations `<O(t)>` on the initial state equal
//! Schrodinger-picture expectations of the `t = 0` operators on `|psi(t)>`,
//! so every witness here reduces to normally ordered moments of `a` and `b`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::state::StateVector;
use crate::model::{Mode, WitnessKind};
use crate::scalar::Real;

/// Cached low-order moments of one state.
struct Moments<'a, T> {
    state: &'a StateVector<T>,
}

impl<T: Real> Moments<'_, T> {
    fn get(&self, p: usize, q: usize, r: usize, s: usize) -> Result<Complex<T>> {
        self.state.moment(p, q, r, s)
    }

    fn mode(&self, mode: Mode, p: usize, q: usize) -> Result<Complex<T>> {
        match mode {
            Mode::Atomic => self.get(p, q, 0, 0),
            Mode::Molecular => self.get(0, 0, p, q),
        }
    }

    /// `<N^(k)> = <c^dag^k c^k>`.
    fn factorial(&self, mode: Mode, k: usize) -> Result<T> {
        Ok(self.mode(mode, k, k)?.re)
    }
}

/// Variance of `X = (c + c^dag)/2` (upper) or `Y = (c - c^dag)/(2i)` from
/// `<c^dag c>`, `<c^2>` and `<c>`.
fn quadrature_variance<T: Real>(n: T, c2: Complex<T>, c1: Complex<T>, x: bool) -> T {
    let quarter = T::lit(0.25);
    let two = T::lit(2.0);
    let base = T::one() + two * n;
    if x {
        quarter * (base + two * c2.re) - c1.re * c1.re
    } else {
        quarter * (base - two * c2.re) - c1.im * c1.im
    }
}

/// Hillery amplitude-squared witness `Var(Y_i) - <N + 1/2>` for one mode.
fn amplitude_squared<T: Real>(m: &Moments<'_, T>, mode: Mode, first: bool) -> Result<T> {
    let half = T::lit(0.5);
    let n = m.mode(mode, 1, 1)?.re;
    let c2 = m.mode(mode, 0, 2)?;
    let c4 = m.mode(mode, 0, 4)?;
    let n2 = m.mode(mode, 2, 2)?.re;
    // Var(Y_1) = [2 Re<c^4> + 2<c^dag^2 c^2> + 4n + 2]/4 - (Re<c^2>)^2, Y_2 flips Re<c^4>
    let (sign, mean) = if first { (T::one(), c2.re) } else { (-T::one(), c2.im) };
    let var = (sign * c4.re + n2) * half + n + half - mean * mean;
    Ok(var - (n + half))
}

/// Evaluates `kind` on `state` directly from its defining criterion.
pub fn witness_exact<T: Real>(state: &StateVector<T>, kind: &WitnessKind) -> Result<T> {
    kind.check()?;
    let m = Moments { state };
    let value = match *kind {
        WitnessKind::VarXa | WitnessKind::VarYa => {
            let x = *kind == WitnessKind::VarXa;
            quadrature_variance(m.get(1, 1, 0, 0)?.re, m.get(0, 2, 0, 0)?, m.get(0, 1, 0, 0)?, x)
        }
        WitnessKind::VarXb | WitnessKind::VarYb => {
            let x = *kind == WitnessKind::VarXb;
            quadrature_variance(m.get(0, 0, 1, 1)?.re, m.get(0, 0, 0, 2)?, m.get(0, 0, 0, 1)?, x)
        }
        WitnessKind::VarXab | WitnessKind::VarYab => {
            // compound mode c = (a + b)/sqrt(2)
            let x = *kind == WitnessKind::VarXab;
            let half = T::lit(0.5);
            let n = (m.get(1, 1, 0, 0)?.re + m.get(0, 0, 1, 1)?.re) * half + m.get(1, 0, 0, 1)?.re;
            let c2 = (m.get(0, 2, 0, 0)? + m.get(0, 0, 0, 2)?) * half + m.get(0, 1, 0, 1)?;
            let c1 = (m.get(0, 1, 0, 0)? + m.get(0, 0, 0, 1)?) * half.sqrt();
            quadrature_variance(n, c2, c1, x)
        }
        WitnessKind::AmpSq1a => amplitude_squared(&m, Mode::Atomic, true)?,
        WitnessKind::AmpSq2a => amplitude_squared(&m, Mode::Atomic, false)?,
        WitnessKind::AmpSq1b => amplitude_squared(&m, Mode::Molecular, true)?,
        WitnessKind::AmpSq2b => amplitude_squared(&m, Mode::Molecular, false)?,
        WitnessKind::Da => {
            let n = m.factorial(Mode::Atomic, 1)?;
            m.factorial(Mode::Atomic, 2)? - n * n
        }
        WitnessKind::Db => {
            let n = m.factorial(Mode::Molecular, 1)?;
            m.factorial(Mode::Molecular, 2)? - n * n
        }
        WitnessKind::Dab => {
            m.get(1, 1, 1, 1)?.re - m.factorial(Mode::Atomic, 1)? * m.factorial(Mode::Molecular, 1)?
        }
        WitnessKind::HoaA(n) | WitnessKind::HoaB(n) => {
            let mode = if matches!(kind, WitnessKind::HoaA(_)) {
                Mode::Atomic
            } else {
                Mode::Molecular
            };
            m.factorial(mode, n as usize)? - m.factorial(mode, 1)?.powi(n as i32)
        }
        WitnessKind::LeeR { l, m: mm, mode } => {
            let (l, mm) = (l as usize, mm as usize);
            let num = m.factorial(mode, l + 1)? * m.factorial(mode, mm - 1)?;
            let den = m.factorial(mode, l)? * m.factorial(mode, mm)?;
            if den == T::zero() {
                return Err(Error::Undefined {
                    kind: kind.to_string(),
                    reason: "vanishing factorial moment in the denominator".into(),
                });
            }
            num / den - T::one()
        }
        WitnessKind::Hz1 => m.get(1, 1, 1, 1)?.re - m.get(0, 1, 1, 0)?.norm_sqr(),
        WitnessKind::Hz2 => {
            m.factorial(Mode::Atomic, 1)? * m.factorial(Mode::Molecular, 1)? - m.get(0, 1, 0, 1)?.norm_sqr()
        }
        WitnessKind::Duan => {
            // d = <(du)^2> + <(dv)^2> - 2 with u = 2 X_ab, v = 2 Y_ab
            let four = T::lit(4.0);
            let vx = witness_exact(state, &WitnessKind::VarXab)?;
            let vy = witness_exact(state, &WitnessKind::VarYab)?;
            four * (vx + vy) - T::lit(2.0)
        }
        WitnessKind::Hz1Higher { n, m: mm } => {
            let (n, mm) = (n as usize, mm as usize);
            m.get(n, n, mm, mm)?.re - m.get(0, n, mm, 0)?.norm_sqr()
        }
        WitnessKind::Hz2Higher { n, m: mm } => {
            let (n, mm) = (n as usize, mm as usize);
            m.get(n, n, 0, 0)?.re * m.get(0, 0, mm, mm)?.re - m.get(0, n, 0, mm)?.norm_sqr()
        }
    };
    Ok(value)
}

/// Largest imaginary residue among the Hermitian moments a witness uses.
/// Diagnostic for the reality of exact witnesses.
pub fn hermitian_residue<T: Real>(state: &StateVector<T>, max_order: usize) -> Result<T> {
    let mut worst = T::zero();
    for p in 0..=max_order.min(state.space().cutoff_a()) {
        for r in 0..=max_order.min(state.space().cutoff_b()) {
            worst = worst.max(state.moment(p, p, r, r)?.im.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fock::{CutoffPolicy, FockSpace, Hamiltonian, PropagatorOptions};
    use crate::model::SystemParams;

    const ALL: &[&str] = &[
        "VarXa", "VarYa", "VarXb", "VarYb", "VarXab", "VarYab", "AmpSq1a", "AmpSq2a", "AmpSq1b", "AmpSq2b",
        "Da", "Db", "Dab", "HOAa(2)", "HOAa(3)", "HOAb(4)", "LeeR(1,1,a)", "LeeR(3,2,b)", "HZ1", "HZ2", "Duan",
        "HZ1Higher(1,2)", "HZ1Higher(2,3)", "HZ2Higher(1,1)", "HZ2Higher(3,2)",
    ];

    fn coherent(alpha: Complex<f64>, beta: Complex<f64>) -> StateVector<f64> {
        let p = SystemParams::new(100.0, 1.0e4, alpha, beta).unwrap();
        let space = Arc::new(FockSpace::build(&p, CutoffPolicy::Auto).unwrap());
        StateVector::coherent(space, alpha, beta).unwrap()
    }

    #[test]
    fn coherent_baselines() {
        let s = coherent(Complex::new(1.2, 0.7), Complex::new(-0.4, 0.9));
        for name in ALL {
            let kind: WitnessKind = name.parse().unwrap();
            let v = witness_exact(&s, &kind).unwrap();
            assert!((v - kind.threshold::<f64>()).abs() < 1e-9, "{name}: {v}");
        }
    }

    #[test]
    fn lee_undefined_on_vacuum() {
        let s = coherent(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        let kind: WitnessKind = "LeeR(2,2,a)".parse().unwrap();
        assert!(matches!(witness_exact(&s, &kind), Err(Error::Undefined { .. })));
    }

    #[test]
    fn hermitian_moments_stay_real() {
        let p = SystemParams::real(100.0, 1.0e4, 2.0, 1.0).unwrap();
        let space = Arc::new(FockSpace::build(&p, CutoffPolicy::Auto).unwrap());
        let h = Hamiltonian::new(&p, space.clone()).unwrap();
        let s = StateVector::coherent(space, p.alpha, p.beta).unwrap();
        let (s, _) = s.propagate(&h, p.rescale(0.2), &PropagatorOptions::default()).unwrap();
        assert!(hermitian_residue(&s, 4).unwrap() < 1e-9);
    }

    #[test]
    fn order_beyond_cutoff_errors() {
        let space = Arc::new(FockSpace::new(3, 3).unwrap());
        let s = StateVector::coherent(space, Complex::new(0.01, 0.0), Complex::new(0.01, 0.0)).unwrap();
        let kind: WitnessKind = "HOAa(5)".parse().unwrap();
        assert!(matches!(witness_exact(&s, &kind), Err(Error::Headroom { .. })));
    }
}
