//! Exact backend: truncated Fock space and Krylov propagation.

mod hamiltonian;
mod operator;
mod propagate;
mod snapshot;
mod space;
mod state;
mod tridiag;
mod witness;

pub use hamiltonian::Hamiltonian;
pub use operator::{SparseMatrix, SymmetricOperator, Tridiagonal};
pub use propagate::{evolve, PropagatorOptions, StepStats};
pub use snapshot::Snapshot;
pub use space::{ChargeBlock, CutoffPolicy, FockSpace};
pub use state::{StateVector, COHERENT_TAIL_BOUND};
pub use tridiag::TridiagonalEigen;
pub use witness::{hermitian_residue, witness_exact};
