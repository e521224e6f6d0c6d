use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::Real;

/// Mass allowed beyond the top shells of an automatically sized space.
const AUTO_TAIL: f64 = 1.0e-12;

/// How cutoffs are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffPolicy {
    /// Mean plus eight standard deviations, widened until the Poisson mass at
    /// or above the top three shells drops below `1e-12`.
    #[default]
    Auto,
    Manual { cutoff_a: usize, cutoff_b: usize },
}

/// States `|K - 2 j, j>` sharing the charge `K = n_a + 2 n_b`, in increasing `n_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeBlock {
    pub charge: usize,
    /// Molecular occupation of the first state.
    pub nb_min: usize,
    /// Global basis indices of the block states.
    pub indices: Vec<usize>,
}

impl ChargeBlock {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Truncated two-mode basis `|n_a, n_b>` with `n_a <= cutoff_a`, `n_b <= cutoff_b`.
///
/// Basis index is `n_a * (cutoff_b + 1) + n_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    cutoff_a: usize,
    cutoff_b: usize,
    blocks: Vec<ChargeBlock>,
}

impl FockSpace {
    pub fn new(cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if cutoff_a < 1 || cutoff_b < 1 {
            return Err(Error::InvalidCutoff(format!(
                "cutoffs must be >= 1, got ({cutoff_a}, {cutoff_b})"
            )));
        }
        let stride = cutoff_b + 1;
        let max_charge = cutoff_a + 2 * cutoff_b;
        let blocks = (0..=max_charge)
            .map(|charge| {
                let nb_min = charge.saturating_sub(cutoff_a).div_ceil(2);
                let nb_max = (charge / 2).min(cutoff_b);
                let indices = (nb_min..=nb_max)
                    .map(|nb| (charge - 2 * nb) * stride + nb)
                    .collect();
                ChargeBlock {
                    charge,
                    nb_min,
                    indices,
                }
            })
            .filter(|b| !b.is_empty())
            .collect();
        Ok(Self {
            cutoff_a,
            cutoff_b,
            blocks,
        })
    }

    /// Sizes a space for the initial coherent state of `params`.
    pub fn build<T: Real>(params: &SystemParams<T>, policy: CutoffPolicy) -> Result<Self> {
        let na = params
            .abs_alpha_sq()
            .to_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::InvalidParams("alpha must be finite".into()))?;
        let nb = params
            .abs_beta_sq()
            .to_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::InvalidParams("beta must be finite".into()))?;
        match policy {
            CutoffPolicy::Auto => {
                let (ca, cb) = auto_cutoffs(na, nb);
                Self::new(ca, cb)
            }
            CutoffPolicy::Manual { cutoff_a, cutoff_b } => {
                if (cutoff_a as f64) < na || (cutoff_b as f64) < nb {
                    return Err(Error::InvalidCutoff(format!(
                        "cutoffs ({cutoff_a}, {cutoff_b}) below mean occupations ({na}, {nb})"
                    )));
                }
                Self::new(cutoff_a, cutoff_b)
            }
        }
    }

    pub fn cutoff_a(&self) -> usize {
        self.cutoff_a
    }

    pub fn cutoff_b(&self) -> usize {
        self.cutoff_b
    }

    pub fn dimension(&self) -> usize {
        (self.cutoff_a + 1) * (self.cutoff_b + 1)
    }

    pub fn index(&self, na: usize, nb: usize) -> usize {
        debug_assert!(na <= self.cutoff_a && nb <= self.cutoff_b);
        na * (self.cutoff_b + 1) + nb
    }

    /// `(n_a, n_b)` of a basis index.
    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / (self.cutoff_b + 1), index % (self.cutoff_b + 1))
    }

    pub fn blocks(&self) -> &[ChargeBlock] {
        &self.blocks
    }

    /// Whether a basis state lies in the monitored top shells
    /// (`n_a >= cutoff_a - 2` or `n_b >= cutoff_b - 2`).
    pub fn is_top_shell(&self, index: usize) -> bool {
        let (na, nb) = self.occupations(index);
        na >= self.cutoff_a.saturating_sub(2) || nb >= self.cutoff_b.saturating_sub(2)
    }

    /// Same space with both cutoffs scaled by `factor`, rounded up.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let grow = |c: usize| ((c as f64) * factor).ceil() as usize;
        Self::new(grow(self.cutoff_a), grow(self.cutoff_b))
    }
}

fn auto_cutoffs(mean_a: f64, mean_b: f64) -> (usize, usize) {
    // conservation of n_a + 2 n_b bounds the molecular growth by mean_a / 2
    let mean_b = mean_b + mean_a / 2.0;
    let gaussian_a = (mean_a + 8.0 * (mean_a + 1.0).sqrt()).ceil() as usize;
    let gaussian_b = (mean_b + 8.0 * (mean_b + 1.0).sqrt()).ceil() as usize;
    let tail_a = poisson_quantile(mean_a, AUTO_TAIL) + 2;
    let tail_b = poisson_quantile(mean_b, AUTO_TAIL) + 2;
    (gaussian_a.max(tail_a).max(1), gaussian_b.max(tail_b).max(1))
}

/// Smallest `k` with `P(n >= k) <= tail` for a Poisson law of mean `mean`.
pub(crate) fn poisson_quantile(mean: f64, tail: f64) -> usize {
    let mut k = 0;
    while poisson_tail(mean, k) > tail {
        k += 1;
    }
    k
}

/// `P(n >= k)` for a Poisson law, summed upwards from `k`.
pub(crate) fn poisson_tail(mean: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if mean == 0.0 {
        return 0.0;
    }
    // log pmf at k
    let mut log_p = -mean + (k as f64) * mean.ln() - ln_factorial(k);
    let mut sum = 0.0;
    let mut n = k;
    loop {
        let p = log_p.exp();
        sum += p;
        n += 1;
        log_p += mean.ln() - (n as f64).ln();
        if (n as f64) > mean && p < sum * 1e-17 {
            break;
        }
        if n > k + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_structure_covers_space() {
        let space = FockSpace::new(5, 3).unwrap();
        let mut seen = vec![false; space.dimension()];
        for block in space.blocks() {
            for (j, &idx) in block.indices.iter().enumerate() {
                let (na, nb) = space.occupations(idx);
                assert_eq!(na + 2 * nb, block.charge);
                assert_eq!(nb, block.nb_min + j);
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn auto_policy_for_small_amplitudes() {
        let p = SystemParams::real(100.0, 1.0e4, 2.0, 1.0).unwrap();
        let space = FockSpace::build(&p, CutoffPolicy::Auto).unwrap();
        assert!(space.cutoff_a() >= 21, "{}", space.cutoff_a());
        assert!(space.cutoff_b() >= 17, "{}", space.cutoff_b());
        let tail = poisson_tail(4.0, space.cutoff_a() + 1) + poisson_tail(1.0, space.cutoff_b() + 1);
        assert!(tail < 1e-12, "{tail:e}");
    }

    #[test]
    fn vacuum_gets_small_space() {
        let p = SystemParams::real(100.0, 1.0e4, 0.0, 0.0).unwrap();
        let space = FockSpace::build(&p, CutoffPolicy::Auto).unwrap();
        assert!(space.cutoff_a() <= 8 && space.cutoff_b() <= 8);
    }

    #[test]
    fn manual_policy_checks() {
        let p = SystemParams::real(100.0, 1.0e4, 3.0, 2.0).unwrap();
        assert!(FockSpace::build(&p, CutoffPolicy::Manual { cutoff_a: 8, cutoff_b: 20 }).is_err());
        assert!(FockSpace::build(&p, CutoffPolicy::Manual { cutoff_a: 30, cutoff_b: 3 }).is_err());
        assert!(FockSpace::build(&p, CutoffPolicy::Manual { cutoff_a: 30, cutoff_b: 20 }).is_ok());
        assert!(FockSpace::new(0, 3).is_err());
    }

    #[test]
    fn poisson_tail_values() {
        assert!((poisson_tail(4.0, 1) - (1.0 - (-4.0f64).exp())).abs() < 1e-15);
        let p20 = (-4.0f64).exp() * 4f64.powi(20) / (1..=20).map(f64::from).product::<f64>();
        let t = poisson_tail(4.0, 20);
        assert!(t > p20 && t < 1.3 * p20);
        assert_eq!(poisson_tail(0.0, 3), 0.0);
    }
}
