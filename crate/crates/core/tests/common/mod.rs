//! Independent oracles shared by integration tests.

#![allow(dead_code)]

use num_complex::Complex64;

/// Coefficient vector `[f1..f8, g1..g8]`.
pub type CoeffVec = [Complex64; 16];

/// Right-hand side of the c-number system obtained by inserting the
/// operator ansatz into the Heisenberg equations
/// `a' = -i d/2 a - i w a^dag b`, `b' = -i w/2 a^2`, normal ordering, and
/// keeping each structure to its own order.
fn rhs(w: f64, d: f64, c: &CoeffVec) -> CoeffVec {
    let i = Complex64::i();
    let rot = -i * (d / 2.0);
    let [f1, f2, f3, f4, f5, f6, f7, f8, g1, g2, g3, g4, _g5, _g6, _g7, _g8] = *c;
    let k = -i * w;
    let kh = -i * (w / 2.0);
    [
        rot * f1,
        rot * f2 + k * f1.conj() * g1,
        rot * f3 + k * f1.conj() * g2,
        rot * f4 + k * f2.conj() * g1,
        rot * f5 + k * f1.conj() * g3,
        rot * f6 + k * f4.conj() * g1,
        rot * f7 + k * (f1.conj() * g4 + f3.conj() * g1),
        rot * f8 + k * f2.conj() * g2,
        Complex64::new(0.0, 0.0),
        kh * f1 * f1,
        kh * f1 * f2,
        k * f1 * f2,
        kh * f1 * f3,
        kh * f2 * f2,
        k * f1 * f4,
        k * f1 * f3,
    ]
}

/// Classical RK4 from the boundary condition `f1 = g1 = 1` to time `t`.
pub fn integrate_coefficients(w: f64, d: f64, t: f64, steps: usize) -> CoeffVec {
    let zero = Complex64::new(0.0, 0.0);
    let mut y = [zero; 16];
    y[0] = Complex64::new(1.0, 0.0);
    y[8] = Complex64::new(1.0, 0.0);
    if t == 0.0 {
        return y;
    }
    let h = t / steps as f64;
    let axpy = |y: &CoeffVec, k: &CoeffVec, s: f64| {
        let mut out = *y;
        out.iter_mut().zip(k).for_each(|(o, k)| *o += k * s);
        out
    };
    for _ in 0..steps {
        let k1 = rhs(w, d, &y);
        let k2 = rhs(w, d, &axpy(&y, &k1, h / 2.0));
        let k3 = rhs(w, d, &axpy(&y, &k2, h / 2.0));
        let k4 = rhs(w, d, &axpy(&y, &k3, h));
        for j in 0..16 {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    y
}

/// RK4 steps that keep `|d| h` below `0.002`.
pub fn steps_for(d: f64, t: f64) -> usize {
    ((d.abs() * t / 0.002).ceil() as usize).max(200)
}
