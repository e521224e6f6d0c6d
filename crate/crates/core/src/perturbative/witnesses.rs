//! Third-order closed forms for every witness, transcribed term by term.
//!
//! Each expression is assembled in complex arithmetic with its explicit
//! complex-conjugate partner, so the result is real up to rounding. Sign
//! pairs follow the stacked notation: the upper sign belongs to the `X`
//! quadrature (index 1), the lower sign to `Y` (index 2).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{SystemParams, WitnessKind};
use crate::perturbative::Coefficients;
use crate::scalar::{binomial, Real};

/// Quadrature of a single or compound mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    Y,
}

/// Mode selector for quadrature variances and antibunching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    A,
    B,
    AB,
}

/// Quantities shared by all closed forms at one `(params, t)`.
struct Terms<T> {
    c: Coefficients<T>,
    alpha: Complex<T>,
    beta: Complex<T>,
    /// `|alpha|^2`
    na: T,
    /// `|beta|^2`
    nb: T,
}

fn cc<T: Real>(z: Complex<T>) -> Complex<T> {
    z + z.conj()
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `x^k` for a possibly negative `k`, treating `coef * x^k` as zero when
/// `coef == 0` so that vanishing binomials never meet `0^(-1)`.
fn weighted_pow<T: Real>(coef: T, x: T, k: i64) -> T {
    if coef == T::zero() {
        T::zero()
    } else {
        coef * x.powi(k as i32)
    }
}

impl<T: Real> Terms<T> {
    fn new(params: &SystemParams<T>, c: &Coefficients<T>) -> Self {
        Self {
            c: *c,
            alpha: params.alpha,
            beta: params.beta,
            na: params.alpha.norm_sqr(),
            nb: params.beta.norm_sqr(),
        }
    }

    /// `alpha^2 beta^*`, the structure carried by most first-order terms.
    fn a2bc(&self) -> Complex<T> {
        self.alpha * self.alpha * self.beta.conj()
    }

    /// `alpha^{*2} beta`.
    fn ac2b(&self) -> Complex<T> {
        self.a2bc().conj()
    }

    fn variance_a(&self, q: Quadrature) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f4, f5, f6, ..
        } = self.c;
        let (alpha, beta, na, nb) = (self.alpha, self.beta, self.na, self.nb);
        let two = T::lit(2.0);
        let common = re(T::one())
            + re(two * f2.norm_sqr() * nb)
            + cc(f2.conj() * f3 * alpha * alpha * beta.conj() * two);
        let pm = cc(f1 * f3 * alpha * alpha
            + (f1 * f2 + f1 * f5) * beta
            + f1 * f5 * beta * (T::lit(6.0) * na)
            + (f1 * f6 + f2 * f4) * beta * nb);
        quarter(common, pm, q)
    }

    fn variance_b(&self, q: Quadrature) -> Complex<T> {
        let Coefficients { g2, g4, g7, .. } = self.c;
        let two = T::lit(2.0);
        let pm = cc((g7 + g2 * g4 * two) * self.alpha * self.alpha * self.beta);
        quarter(re(T::one()), pm, q)
    }

    fn variance_ab(&self, q: Quadrature) -> Complex<T> {
        let Coefficients {
            f1,
            f2,
            f3,
            f4,
            f5,
            f6,
            f8,
            g2,
            g4,
            g5,
            g7,
            ..
        } = self.c;
        let (alpha, beta, na, nb) = (self.alpha, self.beta, self.na, self.nb);
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let common = re(T::one())
            + re(f2.norm_sqr() * nb)
            + cc(f2.conj() * f3 * alpha * alpha * beta.conj() + f2 * g4.conj() * alpha.conj() * nb);
        let pm = cc(f1 * f3 * alpha * alpha
            + (f1 * f2 + f1 * f5) * beta
            + f1 * g4 * alpha * beta * two
            + f1 * g5 * alpha * alpha * alpha * four
            + (f1 * f6 + f2 * f4) * beta * nb
            + (g7 + g2 * g4 * two) * alpha * alpha * beta
            - f8 * alpha.conj() * beta * beta * four
            + f1 * f5 * beta * (T::lit(6.0) * na))
            / two;
        quarter(common, pm, q)
    }

    fn amplitude_squared_a(&self, index: Quadrature) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f4, f5, f8, ..
        } = self.c;
        let (alpha, beta, na, nb) = (self.alpha, self.beta, self.na, self.nb);
        let two = T::lit(2.0);
        let a2 = alpha * alpha;
        let a2bc = self.a2bc();
        let common = re(two * f2.norm_sqr() * na * nb)
            + cc((f1 * f5.conj() + f1.conj() * f8) * a2bc * (two * na)
                + f1 * f2.conj() * a2bc * (two * f2.norm_sqr() * nb)
                - f2.conj() * f3 * a2bc);
        let f1sq = f1 * f1;
        let pm = cc(f1sq * f1 * f3 * a2 * a2
            + f1 * f2 * f2 * f2 * alpha.conj() * alpha.conj() * beta * beta * beta
            + f1sq * f2 * f2 * beta * beta * ((T::one() + T::lit(4.0) * na) / two)
            + f1sq * (f1 * f2 + f1 * f5 * T::lit(7.0) + f2 * f3) * a2 * beta
            + f1sq * (f2 * f3 * two + f1 * f5 * T::lit(3.0)) * a2 * beta * (two * na)
            + f1sq * (f2 * f4 * T::lit(3.0) - f1 * f5 * two) * a2 * beta * nb);
        signed(common, pm, index)
    }

    fn amplitude_squared_b(&self, index: Quadrature) -> Complex<T> {
        let Coefficients { g2, g4, g7, .. } = self.c;
        let b3 = self.beta * self.beta * self.beta;
        let pm = cc((g7 + g2 * g4 * T::lit(2.0)) * self.alpha * self.alpha * b3);
        signed(Complex::new(T::zero(), T::zero()), pm, index)
    }

    fn antibunching_a(&self) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f4, f5, f6, ..
        } = self.c;
        let (na, nb) = (self.na, self.nb);
        let a2bc = self.a2bc();
        let f2n = f2.norm_sqr();
        re(f2n * (nb + T::lit(6.0) * na * nb - na * na / T::lit(2.0)))
            + cc((f2.conj() * f1 + f5.conj() * f1 + f2.conj() * f3) * a2bc
                + (f6.conj() * f1 + f2.conj() * f4 + f2.conj() * f1 * (T::lit(4.0) * f2n))
                    * a2bc
                    * nb
                + (f5.conj() * f1 + f2.conj() * f3) * a2bc * (T::lit(6.0) * na))
    }

    fn antibunching_b(&self) -> Complex<T> {
        let Coefficients { f1, g6, .. } = self.c;
        cc(f1 * f1 * g6 * self.a2bc() * self.nb) * T::lit(2.0)
    }

    fn antibunching_ab(&self) -> Complex<T> {
        let Coefficients { f1, f2, f3, f5, g6, .. } = self.c;
        let (na, nb) = (self.na, self.nb);
        let a2bc = self.a2bc();
        re(-f2.norm_sqr() * na * nb)
            - cc(f1 * f1 * g6 * a2bc * (T::lit(2.0) * nb)
                + (f5.conj() * f1 + f2.conj() * f3) * a2bc * na)
    }

    fn hoa_a(&self, n: u32) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f5, f6, ..
        } = self.c;
        let (na, nb) = (self.na, self.nb);
        let nn = T::lit(f64::from(n));
        let ni = i64::from(n);
        let c2: T = binomial(n, 2);
        let c3: T = binomial(n, 3);
        let c4: T = binomial(n, 4);
        let c5: T = binomial(n, 5);
        let c6: T = binomial(n, 6);
        let half = T::lit(0.5);
        let three = T::lit(3.0);
        let f2n = f2.norm_sqr();
        let f1c = f1.conj();
        let f1c2 = f1c * f1c;
        let f1c3 = f1c2 * f1c;
        let ac2b = self.ac2b();
        let ac4b2 = ac2b * ac2b;
        let ac6b3 = ac4b2 * ac2b;
        let n2 = nn * nn;
        let n3 = n2 * nn;
        let n4 = n3 * nn;

        let head = f2n
            * (weighted_pow(c2 * c2, na, ni - 2) * nb
                + weighted_pow(n3 - nn, na, ni - 1) * nb
                - weighted_pow(half * c2, na, ni));

        // Coefficient brackets are kept as complex numbers, powers of |alpha|^2
        // multiply them afterwards via `scaled`.
        let scaled = |coef: Complex<T>, weight: T, k: i64| -> Complex<T> {
            if weight == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                coef * na.powi(k as i32)
            }
        };

        let t1 = scaled(
            f1c2 * f2 * f3 * (n3 - three * n2 + T::lit(2.0) * nn)
                + f1c * f5 * (three * (n2 - nn))
                + f3.conj() * f2 * (n3 - nn),
            T::one(),
            ni - 1,
        ) * ac2b;
        let t2 = scaled(
            f1c * f2 * c2
                + f1c2 * f2 * f3 * ((n4 - T::lit(6.0) * n3 + T::lit(11.0) * n2 - T::lit(6.0) * nn)
                    / T::lit(4.0))
                + f1c * f5 * (c2 - T::lit(6.0) * c3)
                + f3.conj() * f2 * (c2 * c2),
            T::one(),
            ni - 2,
        ) * ac2b;
        let t3 = scaled(f1c2 * f2 * f2 * (three * c3), c3, ni - 3) * ac4b2;
        let t4 = scaled(f1c2 * f2 * f2 * (three * c4), c4, ni - 4) * ac4b2;
        let f1c3f23 = f1c3 * f2 * f2 * f2;
        let t5 = scaled(f1c3f23 * (T::lit(6.0) * c4), c4, ni - 4) * ac6b3;
        let t6 = scaled(f1c3f23 * (T::lit(15.0) * c5), c5, ni - 5) * ac6b3;
        let t7 = scaled(f1c3f23 * (T::lit(15.0) * c6), c6, ni - 6) * ac6b3;
        let t8 = scaled(
            f1c * f6 * c2 - f1c2 * f2 * f3 * (nn * (nn - T::one()) * (nn - T::one()))
                + f1c * f2 * (half * c2 * (three * n2 - nn - T::lit(4.0)) * f2n)
                - f3.conj() * f2 * (n2 * (nn - T::one())),
            T::one(),
            ni - 2,
        ) * ac2b
            * nb;
        let t9 = scaled(
            f1c * f2 * (T::lit(0.75) * c3 * nn * (three * nn - T::one()) * f2n),
            c3,
            ni - 3,
        ) * ac2b
            * nb;
        let t10 = scaled(f1c * f2 * (three * c2 * c4 * f2n), c4, ni - 4) * ac2b * nb;

        re(head) + cc(t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9 + t10)
    }

    fn hoa_b(&self, n: u32) -> Complex<T> {
        let Coefficients { f1, g6, .. } = self.c;
        let nn = T::lit(f64::from(n));
        cc(f1 * f1 * g6 * self.a2bc() * (nn * (nn - T::one()) * self.nb.powi(n as i32 - 1)))
    }

    fn hz1(&self) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f5, g7, ..
        } = self.c;
        let (na, nb) = (self.na, self.nb);
        let a2bc = self.a2bc();
        re(f2.norm_sqr() * (nb * nb - na * nb))
            + cc((f2.conj() * f3.conj() * f1 * f1 * T::lit(3.0) + f2.conj() * f3 * T::lit(4.0)
                - g7)
                * a2bc
                * nb
                - (f5.conj() * f1 + f2.conj() * f3) * a2bc * na)
    }

    fn hz2(&self) -> Complex<T> {
        let Coefficients {
            f1,
            f2,
            f3,
            f5,
            g2,
            g4,
            g8,
            ..
        } = self.c;
        let (na, nb) = (self.na, self.nb);
        let a2bc = self.a2bc();
        re(f2.norm_sqr() * (nb * nb + na * nb))
            + cc((f5.conj() * f1 * T::lit(2.0) - f2.conj() * f3.conj() * f1 * f1) * a2bc * nb
                - (g8 + g4.conj() * g2) * a2bc * na)
    }

    fn duan(&self) -> Complex<T> {
        let Coefficients { f2, f3, g4, .. } = self.c;
        let nb = self.nb;
        (re(f2.norm_sqr() * nb)
            + cc(f2.conj() * f3 * self.a2bc() + f2 * g4.conj() * self.alpha.conj() * nb))
            * T::lit(2.0)
    }

    /// Higher-order HZ-1 for `n = 1, m = 2`.
    fn hz1_higher_1_2(&self) -> Complex<T> {
        let Coefficients { f2, f3, g2, g7, .. } = self.c;
        let (na, nb) = (self.na, self.nb);
        let two = T::lit(2.0);
        let f2n = f2.norm_sqr();
        let a2bc = self.a2bc();
        re(f2n * (nb * nb * nb - two * na * nb * nb))
            + cc((f2.conj() * f3 + g2 * (T::lit(6.0) * f2n) - g7 * two) * a2bc * (nb * nb)
                - (f2.conj() * f3 * two + g2 * (two * f2n) + g7) * a2bc * (na * nb))
    }

    fn hz2_higher(&self, n: u32, m: u32) -> Complex<T> {
        let Coefficients {
            f1, f2, f3, f5, f8, ..
        } = self.c;
        let (na, nb) = (self.na, self.nb);
        let nn = T::lit(f64::from(n));
        let mm = T::lit(f64::from(m));
        let (ni, mi) = (i64::from(n), i64::from(m));
        let one = T::one();
        let two = T::lit(2.0);
        let f2n = f2.norm_sqr();
        let f1c = f1.conj();
        let f1c2 = f1c * f1c;
        let ac2b = self.ac2b();
        let zero = Complex::new(T::zero(), T::zero());
        let pow = |x: T, k: i64| x.powi(k as i32);

        let head = f2n
            * (mm * nn * pow(na, ni) * pow(nb, mi)
                + weighted_pow(nn * nn, na, ni - 1) * pow(nb, mi + 1));

        let t1 = (f1c2 * f2 * f3 * (mm * nn * (mm - one))
            + f1c * f5 * (mm * nn)
            + f3.conj() * f2 * (mm * mm * nn))
            * pow(na, ni)
            * pow(nb, mi - 1)
            * ac2b;
        let t2 = (f1c * f5 * (two * mm * nn) + f3.conj() * f2 * (nn * nn * (one - two * mm))
            - f1c * f2 * (mm * nn * nn * f2n / two)
            - f1c2 * f2 * f3 * (two * mm * nn * nn))
            * pow(na, ni - 1)
            * pow(nb, mi)
            * ac2b;
        let w3 = nn * (nn - one);
        let t3 = if w3 == T::zero() {
            zero
        } else {
            -(f8.conj() * f1 * mm + f3.conj() * f2 * ((nn - two) * mm) + f1c2 * f2 * f3 * (mm * nn))
                * w3
                * pow(na, ni - 2)
                * pow(nb, mi)
                * ac2b
        };
        let w4 = nn * nn * (nn - one);
        let t4 = if w4 == T::zero() {
            zero
        } else {
            let inner = pow(na, ni - 2) * pow(nb, mi + 1)
                + weighted_pow((nn - two) / two, na, ni - 3) * pow(nb, mi + 1);
            f1c * f2 * (w4 * f2n * inner) * ac2b
        };
        re(head) + cc(t1 + t2 + t3 + t4)
    }
}

fn quarter<T: Real>(common: Complex<T>, pm: Complex<T>, q: Quadrature) -> Complex<T> {
    signed(common, pm, q) / T::lit(4.0)
}

fn signed<T: Real>(common: Complex<T>, pm: Complex<T>, q: Quadrature) -> Complex<T> {
    match q {
        Quadrature::X => common + pm,
        Quadrature::Y => common - pm,
    }
}

/// Evaluates the closed form of `kind` as a complex number. The imaginary
/// part is rounding residue; [`closed_form`] drops it.
pub fn closed_form_complex<T: Real>(
    kind: &WitnessKind,
    params: &SystemParams<T>,
    coeffs: &Coefficients<T>,
) -> Result<Complex<T>> {
    kind.check()?;
    let terms = Terms::new(params, coeffs);
    let value = match *kind {
        WitnessKind::VarXa => terms.variance_a(Quadrature::X),
        WitnessKind::VarYa => terms.variance_a(Quadrature::Y),
        WitnessKind::VarXb => terms.variance_b(Quadrature::X),
        WitnessKind::VarYb => terms.variance_b(Quadrature::Y),
        WitnessKind::VarXab => terms.variance_ab(Quadrature::X),
        WitnessKind::VarYab => terms.variance_ab(Quadrature::Y),
        WitnessKind::AmpSq1a => terms.amplitude_squared_a(Quadrature::X),
        WitnessKind::AmpSq2a => terms.amplitude_squared_a(Quadrature::Y),
        WitnessKind::AmpSq1b => terms.amplitude_squared_b(Quadrature::X),
        WitnessKind::AmpSq2b => terms.amplitude_squared_b(Quadrature::Y),
        WitnessKind::Da => terms.antibunching_a(),
        WitnessKind::Db => terms.antibunching_b(),
        WitnessKind::Dab => terms.antibunching_ab(),
        WitnessKind::HoaA(n) => terms.hoa_a(n),
        WitnessKind::HoaB(n) => terms.hoa_b(n),
        WitnessKind::Hz1 => terms.hz1(),
        WitnessKind::Hz2 => terms.hz2(),
        WitnessKind::Duan => terms.duan(),
        WitnessKind::Hz1Higher { n: 1, m: 2 } => terms.hz1_higher_1_2(),
        WitnessKind::Hz1Higher { .. } => {
            return Err(Error::NotDerived {
                kind: kind.to_string(),
            })
        }
        WitnessKind::Hz2Higher { n, m } => terms.hz2_higher(n, m),
        WitnessKind::LeeR { .. } => {
            return Err(Error::ExactOnly {
                kind: kind.to_string(),
            })
        }
    };
    Ok(value)
}

/// Real value of the closed form of `kind` for precomputed coefficients.
pub fn closed_form<T: Real>(
    kind: &WitnessKind,
    params: &SystemParams<T>,
    coeffs: &Coefficients<T>,
) -> Result<T> {
    closed_form_complex(kind, params, coeffs).map(|z| z.re)
}

/// Closed form of `kind` at physical time `t`.
pub fn witness<T: Real>(kind: &WitnessKind, params: &SystemParams<T>, t: T) -> Result<T> {
    let coeffs = Coefficients::at(params, t)?;
    closed_form(kind, params, &coeffs)
}

/// Quadrature variance of mode `a`, `b` or the compound mode `ab`.
/// Squeezing when below `1/4`.
pub fn variance_quadrature<T: Real>(
    params: &SystemParams<T>,
    t: T,
    channel: Channel,
    quadrature: Quadrature,
) -> Result<T> {
    let kind = match (channel, quadrature) {
        (Channel::A, Quadrature::X) => WitnessKind::VarXa,
        (Channel::A, Quadrature::Y) => WitnessKind::VarYa,
        (Channel::B, Quadrature::X) => WitnessKind::VarXb,
        (Channel::B, Quadrature::Y) => WitnessKind::VarYb,
        (Channel::AB, Quadrature::X) => WitnessKind::VarXab,
        (Channel::AB, Quadrature::Y) => WitnessKind::VarYab,
    };
    witness(&kind, params, t)
}

/// Hillery amplitude-squared witness `A_{index, mode}`; negative means squeezing.
/// `index` 1 is the `X`-like quadrature, 2 the `Y`-like one.
pub fn amplitude_squared<T: Real>(
    params: &SystemParams<T>,
    t: T,
    mode: crate::model::Mode,
    index: Quadrature,
) -> Result<T> {
    use crate::model::Mode;
    let kind = match (mode, index) {
        (Mode::Atomic, Quadrature::X) => WitnessKind::AmpSq1a,
        (Mode::Atomic, Quadrature::Y) => WitnessKind::AmpSq2a,
        (Mode::Molecular, Quadrature::X) => WitnessKind::AmpSq1b,
        (Mode::Molecular, Quadrature::Y) => WitnessKind::AmpSq2b,
    };
    witness(&kind, params, t)
}

/// `D_a`, `D_b` or `D_ab`; negative means antibunching.
pub fn antibunching_d<T: Real>(params: &SystemParams<T>, t: T, channel: Channel) -> Result<T> {
    let kind = match channel {
        Channel::A => WitnessKind::Da,
        Channel::B => WitnessKind::Db,
        Channel::AB => WitnessKind::Dab,
    };
    witness(&kind, params, t)
}

/// `<N^(n)> - <N>^n` for one mode; negative means `(n-1)`-th order antibunching.
pub fn hoa<T: Real>(params: &SystemParams<T>, t: T, mode: crate::model::Mode, n: u32) -> Result<T> {
    let kind = match mode {
        crate::model::Mode::Atomic => WitnessKind::HoaA(n),
        crate::model::Mode::Molecular => WitnessKind::HoaB(n),
    };
    witness(&kind, params, t)
}

/// Lower-order entanglement witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entanglement {
    Hz1,
    Hz2,
    Duan,
}

pub fn entanglement<T: Real>(params: &SystemParams<T>, t: T, kind: Entanglement) -> Result<T> {
    let kind = match kind {
        Entanglement::Hz1 => WitnessKind::Hz1,
        Entanglement::Hz2 => WitnessKind::Hz2,
        Entanglement::Duan => WitnessKind::Duan,
    };
    witness(&kind, params, t)
}

/// Higher-order HZ criteria. Only `(1, 2)` is available for HZ-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HigherEntanglement {
    Hz1,
    Hz2,
}

pub fn entanglement_higher<T: Real>(
    params: &SystemParams<T>,
    t: T,
    kind: HigherEntanglement,
    n: u32,
    m: u32,
) -> Result<T> {
    let kind = match kind {
        HigherEntanglement::Hz1 => WitnessKind::Hz1Higher { n, m },
        HigherEntanglement::Hz2 => WitnessKind::Hz2Higher { n, m },
    };
    witness(&kind, params, t)
}
