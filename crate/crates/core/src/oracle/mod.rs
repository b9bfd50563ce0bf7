//! Ground sets, subset masks and the value-oracle abstraction.
//!
//! A set function is anything implementing [`SetFunction`]. Functions are
//! immutable and shareable across threads; query accounting lives in a
//! separate [`EvalContext`] owned by whoever drives the evaluation.

mod combinators;
mod mask;

pub use combinators::{
    complemented, restricted, with_modular, Complemented, FnOracle, ModularShift, Restricted, Sign,
};
pub use mask::{GroundSet, Members, SubsetMask, WORD_LIMIT};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default comparison tolerance for oracle values.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("ground set must contain at least one element")]
    EmptyGroundSet,
    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("mask over {mask} elements passed to an oracle over {oracle} elements")]
    UniverseMismatch { mask: usize, oracle: usize },
    #[error("a single word cannot describe a ground set of size {n}")]
    WordTooNarrow { n: usize },
    #[error("oracle returned a non-finite value {value} for {set:?}")]
    NonFinite { value: f64, set: SubsetMask },
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight for element {element} is not finite")]
    NonFiniteWeight { element: usize },
}

/// Structural claims an oracle makes about itself. They are trusted by the
/// algorithms and checked only by the verification module.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFlags {
    pub monotone: bool,
    pub symmetric: bool,
    pub nonnegative: bool,
}

impl OracleFlags {
    pub const NONE: OracleFlags = OracleFlags {
        monotone: false,
        symmetric: false,
        nonnegative: false,
    };

    pub fn monotone() -> Self {
        OracleFlags { monotone: true, nonnegative: true, ..Self::NONE }
    }

    pub fn symmetric() -> Self {
        OracleFlags { symmetric: true, nonnegative: true, ..Self::NONE }
    }
}

/// A deterministic set function over `{0, .., n-1}`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Raw evaluation. Callers should go through [`EvalContext::evaluate`],
    /// which validates the mask and counts the query.
    fn value(&self, s: &SubsetMask) -> f64;

    fn flags(&self) -> OracleFlags {
        OracleFlags::NONE
    }
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &SubsetMask) -> f64 {
        (**self).value(s)
    }
    fn flags(&self) -> OracleFlags {
        (**self).flags()
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Box<F> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &SubsetMask) -> f64 {
        (**self).value(s)
    }
    fn flags(&self) -> OracleFlags {
        (**self).flags()
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Arc<F> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, s: &SubsetMask) -> f64 {
        (**self).value(s)
    }
    fn flags(&self) -> OracleFlags {
        (**self).flags()
    }
}

pub type BoxedOracle = Box<dyn SetFunction>;

/// Per-run evaluation context carrying the query counter.
#[derive(Clone, Debug, Default)]
pub struct EvalContext {
    queries: u64,
}

impl EvalContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Evaluates `f(s)`, counting one query.
    pub fn evaluate<F: SetFunction + ?Sized>(
        &mut self,
        f: &F,
        s: &SubsetMask,
    ) -> Result<f64, OracleError> {
        if s.universe() != f.ground_size() {
            return Err(OracleError::UniverseMismatch {
                mask: s.universe(),
                oracle: f.ground_size(),
            });
        }
        self.queries += 1;
        let value = f.value(s);
        if !value.is_finite() {
            return Err(OracleError::NonFinite { value, set: s.clone() });
        }
        Ok(value)
    }

    /// Adds queries spent in a sub-computation with its own context.
    pub fn absorb(&mut self, queries: u64) {
        self.queries += queries;
    }
}

/// One-off evaluation with a throwaway context.
pub fn evaluate<F: SetFunction + ?Sized>(f: &F, s: &SubsetMask) -> Result<f64, OracleError> {
    EvalContext::new().evaluate(f, s)
}

pub(crate) fn check_weights(n: usize, weights: &[f64]) -> Result<(), OracleError> {
    if weights.len() != n {
        return Err(OracleError::WeightLength { expected: n, got: weights.len() });
    }
    if let Some(element) = weights.iter().position(|w| !w.is_finite()) {
        return Err(OracleError::NonFiniteWeight { element });
    }
    Ok(())
}
