//! Submodular function minimization.
//!
//! Small ground sets are minimized exactly by enumeration. Larger ones use the
//! Fujishige–Wolfe minimum-norm-point method over the base polytope, with
//! Edmonds' greedy algorithm as the linear optimization oracle.

mod exhaustive;
mod min_norm;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{with_modular, OracleError, SetFunction, Sign, SubsetMask, DEFAULT_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SfmMethod {
    Exhaustive,
    MinNormPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Exhaustive up to `exhaustive_threshold`, min-norm-point above.
    Auto,
    Exhaustive,
    MinNormPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfmConfig {
    pub method: MethodChoice,
    pub exhaustive_threshold: usize,
    /// Min-norm-point stops once its duality gap is below `gap_scale * scale`,
    /// where `scale = max(1, |f(V)|, max_v |f({v})|)`.
    pub gap_scale: f64,
    /// Cap on minor cycles; `None` means `50 n²`.
    pub max_minor_iterations: Option<usize>,
    pub pivot_tolerance: f64,
    /// Values closer than this count as ties in the exhaustive scan.
    pub tie_tolerance: f64,
}

impl Default for SfmConfig {
    fn default() -> Self {
        SfmConfig {
            method: MethodChoice::Auto,
            exhaustive_threshold: 20,
            gap_scale: 1e-6,
            max_minor_iterations: None,
            pivot_tolerance: 1e-10,
            tie_tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl SfmConfig {
    pub fn exhaustive() -> Self {
        SfmConfig { method: MethodChoice::Exhaustive, ..Self::default() }
    }

    pub fn min_norm_point() -> Self {
        SfmConfig { method: MethodChoice::MinNormPoint, ..Self::default() }
    }

    fn pick(&self, n: usize) -> SfmMethod {
        match self.method {
            MethodChoice::Exhaustive => SfmMethod::Exhaustive,
            MethodChoice::MinNormPoint => SfmMethod::MinNormPoint,
            MethodChoice::Auto if n <= self.exhaustive_threshold => SfmMethod::Exhaustive,
            MethodChoice::Auto => SfmMethod::MinNormPoint,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfmResult {
    pub minimizer: SubsetMask,
    pub min_value: f64,
    pub method: SfmMethod,
    pub iterations: u64,
    pub queries_used: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SfmError {
    #[error("min-norm-point did not converge within {iterations} minor iterations (best value {best_value}, residual {residual:e})")]
    NonConvergence {
        best: SubsetMask,
        best_value: f64,
        residual: f64,
        iterations: usize,
    },
    #[error("exhaustive minimization over {n} elements is not supported (limit 30)")]
    TooLarge { n: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Minimizes `f` over all subsets of its ground set.
///
/// Exhaustive mode breaks ties toward the mask with the smallest word value
/// (bit `i` standing for element `i`), so `∅` wins every tie it is part of.
pub fn minimize<F: SetFunction + ?Sized>(f: &F, cfg: &SfmConfig) -> Result<SfmResult, SfmError> {
    match cfg.pick(f.ground_size()) {
        SfmMethod::Exhaustive => exhaustive::minimize(f, cfg),
        SfmMethod::MinNormPoint => min_norm::minimize(f, cfg),
    }
}

/// Minimizes `f(T) ± Σ_{v ∈ T} weights(v)`.
pub fn minimize_with_modular<F: SetFunction + ?Sized>(
    f: &F,
    weights: &[f64],
    sign: Sign,
    cfg: &SfmConfig,
) -> Result<SfmResult, SfmError> {
    let g = with_modular(f, weights.to_vec(), sign)?;
    minimize(&g, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnOracle, OracleFlags};
    use crate::zoo::{GraphCut, HardPairF1F2, HardPairF3F4, Modular};

    fn triangle() -> GraphCut {
        GraphCut::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn both() -> [SfmConfig; 2] {
        [SfmConfig::exhaustive(), SfmConfig::min_norm_point()]
    }

    #[test]
    fn triangle_minus_weight_on_a() {
        for cfg in both() {
            let r = minimize_with_modular(&triangle(), &[1.5, 0.0, 0.0], Sign::Minus, &cfg).unwrap();
            assert_eq!(r.minimizer, SubsetMask::full(3), "{cfg:?}");
            assert!((r.min_value + 1.5).abs() < 1e-9);
        }
    }

    #[test]
    fn nonnegative_function_with_zero_at_empty() {
        let pair = HardPairF1F2::with_seed(8, 3, 2).unwrap();
        let r = minimize(&pair.f2(), &SfmConfig::exhaustive()).unwrap();
        assert_eq!(r.minimizer, SubsetMask::empty(8));
        assert_eq!(r.min_value, 0.0);
        assert_eq!(r.queries_used, 256);
        let r = minimize_with_modular(&pair.f1(), &[0.0; 8], Sign::Minus, &SfmConfig::default()).unwrap();
        assert!(r.minimizer.is_empty());
    }

    #[test]
    fn f3_minus_half_cardinality_prefers_empty() {
        let pair = HardPairF3F4::with_seed(10, 6, 2, 0).unwrap();
        for cfg in both() {
            let r = minimize_with_modular(&pair.f3(), &[0.5; 10], Sign::Minus, &cfg).unwrap();
            assert!(r.min_value.abs() < 1e-9, "{cfg:?}: {}", r.min_value);
        }
        let r = minimize_with_modular(&pair.f3(), &[0.5; 10], Sign::Minus, &SfmConfig::exhaustive()).unwrap();
        assert!(r.minimizer.is_empty());
    }

    #[test]
    fn cancelling_modular_ties_break_to_empty() {
        let card = Modular::cardinality(6);
        let r = minimize_with_modular(&card, &[1.0; 6], Sign::Minus, &SfmConfig::exhaustive()).unwrap();
        assert!(r.minimizer.is_empty());
        assert_eq!(r.min_value, 0.0);
    }

    #[test]
    fn exhaustive_is_deterministic() {
        let g = GraphCut::new(6, &[(0, 1, 1.0), (2, 3, 1.0), (4, 5, 1.0)]).unwrap();
        let w = [0.5, 0.5, 0.0, 0.0, 0.5, 0.5];
        let a = minimize_with_modular(&g, &w, Sign::Minus, &SfmConfig::exhaustive()).unwrap();
        let b = minimize_with_modular(&g, &w, Sign::Minus, &SfmConfig::exhaustive()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_nonnegative_minimum_is_zero() {
        let g = GraphCut::new(7, &[(0, 1, 2.0), (1, 2, 1.0), (3, 4, 1.0), (5, 6, 0.5)]).unwrap();
        for cfg in both() {
            assert!(minimize(&g, &cfg).unwrap().min_value.abs() < 1e-9);
        }
    }

    #[test]
    fn min_norm_point_handles_wide_ground_sets() {
        // cut of a path on 80 nodes minus a reward on both ends: best is V
        let edges: Vec<_> = (0..79).map(|i| (i, i + 1, 1.0)).collect();
        let g = GraphCut::new(80, &edges).unwrap();
        let mut w = vec![0.0; 80];
        w[0] = 3.0;
        w[79] = 3.0;
        let r = minimize_with_modular(&g, &w, Sign::Minus, &SfmConfig::default()).unwrap();
        assert_eq!(r.method, SfmMethod::MinNormPoint);
        assert!((r.min_value + 6.0).abs() < 1e-6, "{}", r.min_value);
    }

    #[test]
    fn exhaustive_refuses_huge_ground_sets() {
        let f = FnOracle::new(40, OracleFlags::NONE, |_: &SubsetMask| 0.0);
        assert!(matches!(minimize(&f, &SfmConfig::exhaustive()), Err(SfmError::TooLarge { n: 40 })));
    }
}
