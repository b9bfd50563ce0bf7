use super::{check_weights, OracleError, OracleFlags, SetFunction, SubsetMask};

/// `g(S) = f(V \ S)`.
#[derive(Clone, Debug)]
pub struct Complemented<F> {
    base: F,
}

pub fn complemented<F: SetFunction>(base: F) -> Complemented<F> {
    Complemented { base }
}

impl<F: SetFunction> Complemented<F> {
    pub fn base(&self) -> &F {
        &self.base
    }
}

impl<F: SetFunction> SetFunction for Complemented<F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        self.base.value(&s.complement())
    }

    fn flags(&self) -> OracleFlags {
        let b = self.base.flags();
        OracleFlags {
            // complement of a monotone function is antitone
            monotone: false,
            symmetric: b.symmetric,
            nonnegative: b.nonnegative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `g(T) = f(T) ± Σ_{v ∈ T} w(v)`.
#[derive(Clone, Debug)]
pub struct ModularShift<F> {
    base: F,
    weights: Vec<f64>,
    sign: Sign,
}

pub fn with_modular<F: SetFunction>(
    base: F,
    weights: Vec<f64>,
    sign: Sign,
) -> Result<ModularShift<F>, OracleError> {
    check_weights(base.ground_size(), &weights)?;
    Ok(ModularShift { base, weights, sign })
}

impl<F: SetFunction> ModularShift<F> {
    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn shift(&self, s: &SubsetMask) -> f64 {
        self.sign.factor() * s.weight(&self.weights)
    }
}

impl<F: SetFunction> SetFunction for ModularShift<F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        self.base.value(s) + self.shift(s)
    }

    fn flags(&self) -> OracleFlags {
        let b = self.base.flags();
        let zero = self.weights.iter().all(|&w| w == 0.0);
        let increasing = self.weights.iter().all(|&w| self.sign.factor() * w >= 0.0);
        OracleFlags {
            monotone: b.monotone && increasing,
            symmetric: b.symmetric && zero,
            nonnegative: b.nonnegative && increasing,
        }
    }
}

/// The restriction of `f` to subsets of a fixed support `S`, re-indexed so
/// that element `i` stands for `support[i]`.
#[derive(Clone, Debug)]
pub struct Restricted<F> {
    base: F,
    support: Vec<usize>,
}

pub fn restricted<F: SetFunction>(base: F, support: &SubsetMask) -> Restricted<F> {
    assert_eq!(support.universe(), base.ground_size());
    Restricted { base, support: support.to_vec() }
}

impl<F: SetFunction> Restricted<F> {
    /// Maps a mask over the support back to the full ground set.
    pub fn lift(&self, s: &SubsetMask) -> SubsetMask {
        SubsetMask::from_indices(self.base.ground_size(), s.iter().map(|i| self.support[i]))
            .expect("support indices are in range")
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

impl<F: SetFunction> SetFunction for Restricted<F> {
    fn ground_size(&self) -> usize {
        self.support.len()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        self.base.value(&self.lift(s))
    }

    fn flags(&self) -> OracleFlags {
        let b = self.base.flags();
        OracleFlags { symmetric: false, ..b }
    }
}

/// A set function backed by a closure.
pub struct FnOracle<G> {
    n: usize,
    flags: OracleFlags,
    f: G,
}

impl<G> FnOracle<G>
where
    G: Fn(&SubsetMask) -> f64 + Send + Sync,
{
    pub fn new(n: usize, flags: OracleFlags, f: G) -> Self {
        FnOracle { n, flags, f }
    }
}

impl<G> SetFunction for FnOracle<G>
where
    G: Fn(&SubsetMask) -> f64 + Send + Sync,
{
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        (self.f)(s)
    }

    fn flags(&self) -> OracleFlags {
        self.flags
    }
}
