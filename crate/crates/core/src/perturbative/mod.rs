//! Closed-form backend built on the third-order operator solution.

mod coefficients;
mod witnesses;

pub use coefficients::{CoefficientFault, CoefficientIndex, Coefficients};
pub use witnesses::{
    amplitude_squared, antibunching_d, closed_form, closed_form_complex, entanglement,
    entanglement_higher, hoa, variance_quadrature, witness, Channel, Entanglement,
    HigherEntanglement, Quadrature,
};
