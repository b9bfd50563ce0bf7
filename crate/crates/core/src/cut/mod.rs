//! Submodular sparsest cut and balanced cut.
//!
//! The sparsest-cut decision procedure orients the demand pairs with a random
//! set, turns the orientation into signed node weights, and minimizes
//! `f(T) - α·w(T)`. Balanced cuts are assembled from repeated approximate
//! weighted sparsest cuts, zeroing the weight of every side already taken.

mod sbc;
mod ssc;

pub use sbc::{sbc_general, sbc_symmetric, SbcOptions, SbcResult};
pub use ssc::{ssc_approximate, ssc_decide, weighted_ssc_fast_weights, SscApproximation};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{check_weights, EvalContext, OracleError, SetFunction, SubsetMask};
use crate::sfm::SfmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("certificate check failed for the returned cut: value {value}, separated demand {separated}, alpha {alpha}")]
    Certificate { value: f64, separated: f64, alpha: f64 },
    #[error("the sparsest-cut subroutine returned a cut separating no residual weight")]
    InfiniteRatio,
    #[error("balanced-cut loop exceeded {0} iterations")]
    NoTermination(usize),
    #[error(transparent)]
    Sfm(#[from] SfmError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandPair {
    pub u: usize,
    pub v: usize,
    pub d: f64,
}

impl DemandPair {
    pub fn new(u: usize, v: usize, d: f64) -> Result<Self, CutError> {
        if u == v {
            return Err(CutError::Instance(format!("demand pair ({u}, {v}) joins an element to itself")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(CutError::Instance(format!("demand of pair ({u}, {v}) must be positive, got {d}")));
        }
        Ok(DemandPair { u, v, d })
    }
}

/// Demands between elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demands {
    Pairs(Vec<DemandPair>),
    /// Every pair `{u, v}` has demand `w(u)·w(v)`.
    Product(Vec<f64>),
}

/// A sparsest-cut instance: minimize `f(S)` over the demand separated by `S`.
#[derive(Clone, Debug)]
pub struct SscInstance<F> {
    oracle: F,
    demands: Demands,
}

impl<F: SetFunction> SscInstance<F> {
    pub fn new(oracle: F, demands: Demands) -> Result<Self, CutError> {
        let n = oracle.ground_size();
        match &demands {
            Demands::Pairs(pairs) => {
                if pairs.is_empty() {
                    return Err(CutError::Instance("no demand pairs".into()));
                }
                for p in pairs {
                    DemandPair::new(p.u, p.v, p.d)?;
                    if p.u >= n || p.v >= n {
                        return Err(CutError::Instance(format!(
                            "demand pair ({}, {}) is outside the ground set of size {n}",
                            p.u, p.v
                        )));
                    }
                }
            }
            Demands::Product(w) => {
                check_weights(n, w)?;
                if w.iter().any(|&x| x < 0.0) {
                    return Err(CutError::Instance("node weights must be nonnegative".into()));
                }
                if w.iter().filter(|&&x| x > 0.0).count() < 2 {
                    return Err(CutError::Instance("need at least two nodes of positive weight".into()));
                }
            }
        }
        Ok(SscInstance { oracle, demands })
    }

    /// Uniform instance: unit weights, so every pair has demand one.
    pub fn uniform(oracle: F) -> Result<Self, CutError> {
        let n = oracle.ground_size();
        Self::new(oracle, Demands::Product(vec![1.0; n]))
    }

    pub fn oracle(&self) -> &F {
        &self.oracle
    }

    pub fn demands(&self) -> &Demands {
        &self.demands
    }

    pub fn ground_size(&self) -> usize {
        self.oracle.ground_size()
    }

    /// Total demand of pairs with exactly one endpoint in `t`.
    pub fn separated(&self, t: &SubsetMask) -> f64 {
        match &self.demands {
            Demands::Pairs(pairs) => pairs
                .iter()
                .filter(|p| t.contains(p.u) != t.contains(p.v))
                .map(|p| p.d)
                .sum(),
            Demands::Product(w) => {
                let inside = t.weight(w);
                let total: f64 = w.iter().sum();
                inside * (total - inside)
            }
        }
    }

    /// Node weights induced by orienting every pair separated by `s` from its
    /// endpoint in `s` to its endpoint outside.
    pub fn signed_weights(&self, s: &SubsetMask) -> Vec<f64> {
        match &self.demands {
            Demands::Pairs(pairs) => {
                let mut w = vec![0.0; self.ground_size()];
                for p in pairs {
                    match (s.contains(p.u), s.contains(p.v)) {
                        (true, false) => {
                            w[p.u] += p.d;
                            w[p.v] -= p.d;
                        }
                        (false, true) => {
                            w[p.v] += p.d;
                            w[p.u] -= p.d;
                        }
                        _ => {}
                    }
                }
                w
            }
            Demands::Product(w) => weighted_ssc_fast_weights(s, w),
        }
    }

    /// `f(t) / separated(t)`, infinite when nothing is separated.
    pub fn ratio(&self, ctx: &mut EvalContext, t: &SubsetMask) -> Result<f64, CutError> {
        let sep = self.separated(t);
        if sep <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(ctx.evaluate(&self.oracle, t)? / sep)
    }
}
