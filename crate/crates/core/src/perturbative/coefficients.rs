use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::Real;

/// The sixteen evolution coefficients of the third-order operator solution
///
/// ```text
/// a(t) = f1 a + f2 a^dag b + f3 a^dag a^2 + f4 a b^dag b + f5 a^dag b
///      + f6 a^dag b^dag b^2 + f7 a^dag^2 a b + f8 a^3 b^dag
/// b(t) = g1 b + g2 a^2 + g3 b + g4 a^dag a b + g5 a^2 + g6 a^dag^2 b^2
///      + g7 a^2 b^dag b + g8 a^dag a^3
/// ```
///
/// with all operators on the right taken at `t = 0`. Terms with the same
/// operator structure but different perturbative order (`f2`/`f5`,
/// `g1`/`g3`, `g2`/`g5`) are kept separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub f1: Complex<T>,
    pub f2: Complex<T>,
    pub f3: Complex<T>,
    pub f4: Complex<T>,
    pub f5: Complex<T>,
    pub f6: Complex<T>,
    pub f7: Complex<T>,
    pub f8: Complex<T>,
    pub g1: Complex<T>,
    pub g2: Complex<T>,
    pub g3: Complex<T>,
    pub g4: Complex<T>,
    pub g5: Complex<T>,
    pub g6: Complex<T>,
    pub g7: Complex<T>,
    pub g8: Complex<T>,
    /// Physical time `t`.
    pub at_time: T,
}

impl<T: Real> Coefficients<T> {
    /// Closed-form coefficients at physical time `t`.
    pub fn at(params: &SystemParams<T>, t: T) -> Result<Self> {
        params.check()?;
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::InvalidGrid(format!("time must be finite and >= 0, got {t}")));
        }
        let omega = params.omega;
        let delta = params.delta;
        let two = T::lit(2.0);
        let i = Complex::<T>::i();
        let real = |x: T| Complex::new(x, T::zero());

        let phase = delta * t;
        let half = phase / two;
        let (s, c) = half.sin_cos();
        let ratio = omega / delta;
        let ratio2 = ratio * ratio;
        let ratio3 = ratio2 * ratio;

        let f1 = Complex::from_polar(T::one(), -half);
        let f2 = Complex::new(T::zero(), -two * ratio * s);
        let f3 = i * real(ratio2) * (real(s) - f1 * half);
        let f4 = -f3 * two;
        let f5 = -i * real(ratio3 * (phase * c - two * s));
        let f6 = -f5 * two;
        let f7 = f5 * T::lit(3.0);
        let f8 = -i * real(ratio3) * f1 * (phase - phase.sin());

        let g1 = Complex::new(T::one(), T::zero());
        let g2 = f1 * f2 / two;
        let g3 = f1 * f3.conj();
        let g4 = g3 * two;
        let g5 = f1 * f5 / two;
        let g6 = f1 * f8.conj();
        let g7 = -g5 * T::lit(4.0);
        let g8 = g5 * two;

        Ok(Self {
            f1,
            f2,
            f3,
            f4,
            f5,
            f6,
            f7,
            f8,
            g1,
            g2,
            g3,
            g4,
            g5,
            g6,
            g7,
            g8,
            at_time: t,
        })
    }

    /// Coefficients as `[f1..f8, g1..g8]`.
    pub fn to_array(&self) -> [Complex<T>; 16] {
        [
            self.f1, self.f2, self.f3, self.f4, self.f5, self.f6, self.f7, self.f8, self.g1,
            self.g2, self.g3, self.g4, self.g5, self.g6, self.g7, self.g8,
        ]
    }

    pub fn get(&self, index: CoefficientIndex) -> Complex<T> {
        self.to_array()[index.flat()]
    }

    pub fn get_mut(&mut self, index: CoefficientIndex) -> &mut Complex<T> {
        match index {
            CoefficientIndex::F(1) => &mut self.f1,
            CoefficientIndex::F(2) => &mut self.f2,
            CoefficientIndex::F(3) => &mut self.f3,
            CoefficientIndex::F(4) => &mut self.f4,
            CoefficientIndex::F(5) => &mut self.f5,
            CoefficientIndex::F(6) => &mut self.f6,
            CoefficientIndex::F(7) => &mut self.f7,
            CoefficientIndex::F(8) => &mut self.f8,
            CoefficientIndex::G(1) => &mut self.g1,
            CoefficientIndex::G(2) => &mut self.g2,
            CoefficientIndex::G(3) => &mut self.g3,
            CoefficientIndex::G(4) => &mut self.g4,
            CoefficientIndex::G(5) => &mut self.g5,
            CoefficientIndex::G(6) => &mut self.g6,
            CoefficientIndex::G(7) => &mut self.g7,
            CoefficientIndex::G(8) => &mut self.g8,
            _ => unreachable!("CoefficientIndex is validated on construction"),
        }
    }
}

/// Names one of `f1..f8`, `g1..g8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientIndex {
    F(u8),
    G(u8),
}

impl CoefficientIndex {
    pub fn new_f(i: u8) -> Result<Self> {
        Self::checked(CoefficientIndex::F(i))
    }

    pub fn new_g(i: u8) -> Result<Self> {
        Self::checked(CoefficientIndex::G(i))
    }

    fn checked(idx: Self) -> Result<Self> {
        let (CoefficientIndex::F(i) | CoefficientIndex::G(i)) = idx;
        if (1..=8).contains(&i) {
            Ok(idx)
        } else {
            Err(Error::InvalidParams(format!("no coefficient {idx}")))
        }
    }

    fn flat(self) -> usize {
        match self {
            CoefficientIndex::F(i) => usize::from(i) - 1,
            CoefficientIndex::G(i) => usize::from(i) + 7,
        }
    }
}

impl fmt::Display for CoefficientIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientIndex::F(i) => write!(f, "f{i}"),
            CoefficientIndex::G(i) => write!(f, "g{i}"),
        }
    }
}

impl FromStr for CoefficientIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParams(format!("no coefficient `{s}`"));
        let (head, tail) = s.split_at_checked(1).ok_or_else(bad)?;
        let i: u8 = tail.parse().map_err(|_| bad())?;
        match head {
            "f" => Self::new_f(i),
            "g" => Self::new_g(i),
            _ => Err(bad()),
        }
    }
}

/// Multiplies one coefficient by a constant before witnesses are evaluated.
///
/// Fault-injection hook for exercising the cross-backend comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientFault<T> {
    pub index: CoefficientIndex,
    pub factor: T,
}

impl<T: Real> CoefficientFault<T> {
    pub fn apply(&self, coeffs: &mut Coefficients<T>) {
        let slot = coeffs.get_mut(self.index);
        *slot = *slot * self.factor;
    }
}
