//! Hard pairs: a fixed function and a randomized counterpart that agree on
//! every set except those correlated with a hidden set or partition.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{invalid, random_subset, ZooError};
use crate::oracle::{OracleFlags, SetFunction, SubsetMask};

/// `f1(S) = min(|S|, n/2) - |S|/2` and
/// `f2(S) = min(|S|, n/2, β + |S ∩ R|, β + |S \ R|) - |S|/2` with `|R| = n/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardPairF1F2 {
    n: usize,
    beta: usize,
    hidden: SubsetMask,
}

impl HardPairF1F2 {
    pub fn new(n: usize, beta: usize, hidden: SubsetMask) -> Result<Self, ZooError> {
        const FAMILY: &str = "f1f2";
        if n == 0 || n % 4 != 0 {
            return Err(invalid(FAMILY, format!("n must be a positive multiple of 4, got {n}")));
        }
        if !(4 * beta >= n && 2 * beta <= n) {
            return Err(invalid(FAMILY, format!("beta must satisfy n/4 <= beta <= n/2, got beta={beta}, n={n}")));
        }
        if hidden.universe() != n || hidden.len() != n / 2 {
            return Err(invalid(FAMILY, format!("hidden set must have n/2 = {} elements", n / 2)));
        }
        Ok(HardPairF1F2 { n, beta, hidden })
    }

    /// Draws `R` uniformly among `n/2`-subsets.
    pub fn with_seed(n: usize, beta: usize, seed: u64) -> Result<Self, ZooError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = if n % 4 == 0 { n / 2 } else { 0 };
        Self::new(n, beta, random_subset(&mut rng, n.max(1), size))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// `ε = 4β/n - 1`.
    pub fn epsilon(&self) -> f64 {
        4.0 * self.beta as f64 / self.n as f64 - 1.0
    }

    pub fn hidden(&self) -> &SubsetMask {
        &self.hidden
    }

    pub fn f1(&self) -> F1 {
        F1 { n: self.n }
    }

    pub fn f2(&self) -> F2 {
        F2 { n: self.n, beta: self.beta, hidden: self.hidden.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F1 {
    n: usize,
}

impl SetFunction for F1 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let size = s.len();
        size.min(self.n / 2) as f64 - size as f64 / 2.0
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::symmetric()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F2 {
    n: usize,
    beta: usize,
    hidden: SubsetMask,
}

impl SetFunction for F2 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let size = s.len();
        let inside = s.intersection_len(&self.hidden);
        let outside = size - inside;
        let m = size
            .min(self.n / 2)
            .min(self.beta + inside)
            .min(self.beta + outside);
        m as f64 - size as f64 / 2.0
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::symmetric()
    }
}

/// `f3(S) = min(|S|, α)` and `f4(S) = min(β + |S \ R|, |S|, α)` with `|R| = α`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardPairF3F4 {
    n: usize,
    alpha: usize,
    beta: usize,
    hidden: SubsetMask,
}

impl HardPairF3F4 {
    pub fn new(n: usize, alpha: usize, beta: usize, hidden: SubsetMask) -> Result<Self, ZooError> {
        const FAMILY: &str = "f3f4";
        if !(1 <= beta && beta < alpha && alpha <= n) {
            return Err(invalid(FAMILY, format!("need 1 <= beta < alpha <= n, got beta={beta}, alpha={alpha}, n={n}")));
        }
        if hidden.universe() != n || hidden.len() != alpha {
            return Err(invalid(FAMILY, format!("hidden set must have alpha = {alpha} elements")));
        }
        Ok(HardPairF3F4 { n, alpha, beta, hidden })
    }

    pub fn with_seed(n: usize, alpha: usize, beta: usize, seed: u64) -> Result<Self, ZooError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = alpha.min(n);
        Self::new(n, alpha, beta, random_subset(&mut rng, n.max(1), size))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn hidden(&self) -> &SubsetMask {
        &self.hidden
    }

    pub fn f3(&self) -> F3 {
        F3 { n: self.n, alpha: self.alpha }
    }

    pub fn f4(&self) -> F4 {
        F4 { n: self.n, alpha: self.alpha, beta: self.beta, hidden: self.hidden.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F3 {
    n: usize,
    alpha: usize,
}

impl SetFunction for F3 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        s.len().min(self.alpha) as f64
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F4 {
    n: usize,
    alpha: usize,
    beta: usize,
    hidden: SubsetMask,
}

impl SetFunction for F4 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let size = s.len();
        let outside = size - s.intersection_len(&self.hidden);
        (self.beta + outside).min(size).min(self.alpha) as f64
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}

/// `f5(S) = min(|S|, α)` and `f6(S) = min(Σ_i min(β, |S ∩ V_i|), α)` for a
/// partition of `V` into `m` blocks of size `α = n/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardPairF5F6 {
    n: usize,
    m: usize,
    beta: usize,
    blocks: Vec<SubsetMask>,
}

impl HardPairF5F6 {
    pub fn new(n: usize, m: usize, beta: usize, blocks: Vec<SubsetMask>) -> Result<Self, ZooError> {
        const FAMILY: &str = "f5f6";
        if m == 0 || n == 0 || n % m != 0 {
            return Err(invalid(FAMILY, format!("m must divide n, got m={m}, n={n}")));
        }
        let alpha = n / m;
        if !(1 <= beta && beta <= alpha) {
            return Err(invalid(FAMILY, format!("need 1 <= beta <= alpha = {alpha}, got beta={beta}")));
        }
        if blocks.len() != m || blocks.iter().any(|b| b.universe() != n || b.len() != alpha) {
            return Err(invalid(FAMILY, format!("partition must have {m} blocks of size {alpha}")));
        }
        let mut seen = SubsetMask::empty(n);
        for b in &blocks {
            if !seen.is_disjoint(b) {
                return Err(invalid(FAMILY, "partition blocks overlap"));
            }
            seen = seen.union(b);
        }
        Ok(HardPairF5F6 { n, m, beta, blocks })
    }

    /// Draws a uniformly random partition into `m` equal blocks.
    pub fn with_seed(n: usize, m: usize, beta: usize, seed: u64) -> Result<Self, ZooError> {
        if m == 0 || n == 0 || n % m != 0 {
            return Err(invalid("f5f6", format!("m must divide n, got m={m}, n={n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let blocks = order
            .chunks(n / m)
            .map(|c| SubsetMask::from_indices(n, c.iter().copied()).expect("in range"))
            .collect();
        Self::new(n, m, beta, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> usize {
        self.n / self.m
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn blocks(&self) -> &[SubsetMask] {
        &self.blocks
    }

    pub fn f5(&self) -> F5 {
        F5 { n: self.n, alpha: self.alpha() }
    }

    pub fn f6(&self) -> F6 {
        F6 { n: self.n, alpha: self.alpha(), beta: self.beta, blocks: self.blocks.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F5 {
    n: usize,
    alpha: usize,
}

impl SetFunction for F5 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        s.len().min(self.alpha) as f64
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct F6 {
    n: usize,
    alpha: usize,
    beta: usize,
    blocks: Vec<SubsetMask>,
}

impl SetFunction for F6 {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let capped: usize = self
            .blocks
            .iter()
            .map(|b| s.intersection_len(b).min(self.beta))
            .sum();
        capped.min(self.alpha) as f64
    }

    fn flags(&self) -> OracleFlags {
        OracleFlags::monotone()
    }
}
