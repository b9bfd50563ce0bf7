//! Shared vocabulary for randomized relaxed decision procedures.
//!
//! A decision procedure receives a target value `B` and a success probability
//! `p`. It either returns a solution whose cost is within its approximation
//! factor of `B`, or fails. Failing is not an error: the instance may be
//! infeasible, or the procedure may simply have been unlucky.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::DEFAULT_TOLERANCE;
use crate::sfm::SfmConfig;

/// `c = 1 / (4 √(2π))`, the constant in the sampling lower bound.
pub const SAMPLING_CONSTANT: f64 = 0.099_735_570_100_358_17;

/// Default ceiling on loop iterations for every procedure.
pub const DEFAULT_ITERATION_CAP: u64 = 100_000;

/// How many iterations a procedure may spend before it reports failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BudgetPolicy {
    /// The iteration count from the success-probability analysis. Spelled
    /// `paper` on the command line and on disk.
    #[serde(rename = "paper")]
    Analytical,
    /// The analytical count, but never more than `cap`.
    Capped { cap: u64 },
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy::Capped { cap: DEFAULT_ITERATION_CAP }
    }
}

impl BudgetPolicy {
    pub fn capped(cap: u64) -> Self {
        BudgetPolicy::Capped { cap }
    }

    pub fn resolve(self, analytical: f64) -> BudgetRecord {
        let full = if analytical.is_finite() && analytical < u64::MAX as f64 {
            analytical.ceil().max(1.0) as u64
        } else {
            u64::MAX
        };
        let effective = match self {
            BudgetPolicy::Analytical => full,
            BudgetPolicy::Capped { cap } => full.min(cap),
        };
        BudgetRecord { policy: self, analytical, effective }
    }
}

/// The budget a run actually used, next to the analytical one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub policy: BudgetPolicy,
    pub analytical: f64,
    pub effective: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    /// The iteration budget ran out.
    BudgetExhausted,
    /// A deterministic step found no set with negative objective.
    NoImprovingSet,
    /// Some single element already costs at least `B`.
    SingletonAboveTarget,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision<S> {
    Solution(S),
    Fail(FailReason),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionOutcome<S> {
    pub status: Decision<S>,
    /// Problem-specific value of the solution; `None` on failure.
    pub objective: Option<f64>,
    pub iterations: u64,
    pub queries: u64,
    pub seed: u64,
    pub budget: BudgetRecord,
}

impl<S> DecisionOutcome<S> {
    pub fn solution(&self) -> Option<&S> {
        match &self.status {
            Decision::Solution(s) => Some(s),
            Decision::Fail(_) => None,
        }
    }

    pub fn is_solution(&self) -> bool {
        matches!(self.status, Decision::Solution(_))
    }

    pub fn into_solution(self) -> Option<S> {
        match self.status {
            Decision::Solution(s) => Some(s),
            Decision::Fail(_) => None,
        }
    }
}

/// Knobs shared by every decision procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionOptions {
    pub budget: BudgetPolicy,
    pub sfm: SfmConfig,
    /// Strict comparisons `x < 0` are evaluated as `x < -tolerance`.
    pub tolerance: f64,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        DecisionOptions {
            budget: BudgetPolicy::default(),
            // the inner minimization runs once per iteration, so enumeration
            // stops paying off well before the standalone threshold
            sfm: SfmConfig { exhaustive_threshold: 10, ..SfmConfig::default() },
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl DecisionOptions {
    pub fn with_budget(budget: BudgetPolicy) -> Self {
        DecisionOptions { budget, ..Self::default() }
    }
}

/// Seed for the `index`-th sub-run of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `√(n / ln n)`, the approximation scale shared by all procedures.
pub fn sqrt_n_over_ln_n(n: usize) -> f64 {
    let n = n as f64;
    (n / n.ln()).sqrt()
}

pub(crate) fn check_probability(p: f64) -> bool {
    p.is_finite() && p > 0.0 && p < 1.0
}
