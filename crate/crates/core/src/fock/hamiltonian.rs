use std::sync::Arc;

use crate::error::Result;
use crate::fock::operator::{SparseMatrix, Tridiagonal};
use crate::fock::space::FockSpace;
use crate::model::SystemParams;
use crate::scalar::{sqrt_falling, Real};

/// `H = (delta/2) a^dag a + (omega/2)(a^dag^2 b + a^2 b^dag)` on a truncated space.
///
/// Stored twice: as one sparse matrix and as one tridiagonal block per
/// conserved charge `K = n_a + 2 n_b`.
#[derive(Debug, Clone)]
pub struct Hamiltonian<T> {
    space: Arc<FockSpace>,
    delta: T,
    omega: T,
    full: SparseMatrix<T>,
    blocks: Vec<Tridiagonal<T>>,
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(params: &SystemParams<T>, space: Arc<FockSpace>) -> Result<Self> {
        params.check()?;
        let half = T::lit(0.5);
        let delta = params.delta;
        let omega = params.omega;

        let blocks: Vec<Tridiagonal<T>> = space
            .blocks()
            .iter()
            .map(|block| {
                let diag = block
                    .indices
                    .iter()
                    .map(|&idx| delta * half * T::count(space.occupations(idx).0))
                    .collect();
                // a^2 b^dag takes |n_a, n_b> to |n_a - 2, n_b + 1>
                let off = block
                    .indices
                    .iter()
                    .take(block.len().saturating_sub(1))
                    .map(|&idx| {
                        let (na, nb) = space.occupations(idx);
                        omega * half * sqrt_falling::<T>(na, 2) * T::count(nb + 1).sqrt()
                    })
                    .collect();
                Tridiagonal { diag, off }
            })
            .collect();

        let mut triplets = Vec::new();
        for (block, tri) in space.blocks().iter().zip(&blocks) {
            for (j, &idx) in block.indices.iter().enumerate() {
                triplets.push((idx, idx, tri.diag[j]));
                if let Some(&next) = block.indices.get(j + 1) {
                    triplets.push((idx, next, tri.off[j]));
                    triplets.push((next, idx, tri.off[j]));
                }
            }
        }
        let full = SparseMatrix::from_triplets(space.dimension(), triplets);

        Ok(Self {
            space,
            delta,
            omega,
            full,
            blocks,
        })
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn full(&self) -> &SparseMatrix<T> {
        &self.full
    }

    /// Tridiagonal block of each entry of [`FockSpace::blocks`].
    pub fn blocks(&self) -> &[Tridiagonal<T>] {
        &self.blocks
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn omega(&self) -> T {
        self.omega
    }
}
