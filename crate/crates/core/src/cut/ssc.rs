use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CutError, SscInstance};
use crate::decision::{
    check_probability, derive_seed, rng_from, sqrt_n_over_ln_n, Decision, DecisionOptions, DecisionOutcome,
    FailReason, SAMPLING_CONSTANT,
};
use crate::oracle::{EvalContext, SetFunction, Sign, SubsetMask};
use crate::sfm::minimize_with_modular;

/// Signed node weights for product demands `d(u, v) = w(u)·w(v)`.
///
/// Summing `±d` over the pairs separated by `s` gives `+w(v)·w(V∖S)` for
/// `v ∈ S` and `-w(v)·w(S)` for `v ∉ S`.
pub fn weighted_ssc_fast_weights(s: &SubsetMask, w: &[f64]) -> Vec<f64> {
    let inside = s.weight(w);
    let outside: f64 = w.iter().sum::<f64>() - inside;
    w.iter()
        .enumerate()
        .map(|(v, &wv)| if s.contains(v) { wv * outside } else { -wv * inside })
        .collect()
}

fn check_size(n: usize) -> Result<(), CutError> {
    if n < 3 {
        return Err(CutError::Instance(format!("need at least 3 elements, got {n}")));
    }
    Ok(())
}

/// Randomized relaxed decision procedure for sparsest cut.
///
/// On a feasible instance (some cut has ratio below `b`) it returns, with
/// probability at least `p` under the analytical budget, a cut of ratio below
/// `4 √(n/ln n)·b`. Every returned cut carries that certificate regardless of
/// feasibility.
pub fn ssc_decide<F: SetFunction>(
    inst: &SscInstance<F>,
    b: f64,
    p: f64,
    opts: &DecisionOptions,
    seed: u64,
) -> Result<DecisionOutcome<SubsetMask>, CutError> {
    let n = inst.ground_size();
    check_size(n)?;
    if !(b.is_finite() && b > 0.0) {
        return Err(CutError::Parameter(format!("B must be positive, got {b}")));
    }
    if !check_probability(p) {
        return Err(CutError::Parameter(format!("p must lie in (0, 1), got {p}")));
    }
    let nf = n as f64;
    let alpha = 4.0 * sqrt_n_over_ln_n(n) * b;
    let budget = opts.budget.resolve(8.0 * nf.powi(3) / SAMPLING_CONSTANT * (1.0 / (1.0 - p)).ln());
    let mut rng = rng_from(seed);
    let mut ctx = EvalContext::new();

    for iteration in 1..=budget.effective {
        let s = SubsetMask::from_fn(n, |_| rng.gen_bool(0.5));
        let weights: Vec<f64> = inst.signed_weights(&s).into_iter().map(|w| alpha * w).collect();
        let r = minimize_with_modular(inst.oracle(), &weights, Sign::Minus, &opts.sfm)?;
        ctx.absorb(r.queries_used);
        if r.min_value < -opts.tolerance {
            let t = r.minimizer;
            let value = ctx.evaluate(inst.oracle(), &t)?;
            let separated = inst.separated(&t);
            if !(separated > 0.0 && value / separated < alpha) {
                return Err(CutError::Certificate { value, separated, alpha });
            }
            return Ok(DecisionOutcome {
                status: Decision::Solution(t),
                objective: Some(value / separated),
                iterations: iteration,
                queries: ctx.queries(),
                seed,
                budget,
            });
        }
    }
    Ok(DecisionOutcome {
        status: Decision::Fail(FailReason::BudgetExhausted),
        objective: None,
        iterations: budget.effective,
        queries: ctx.queries(),
        seed,
        budget,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SscApproximation {
    pub set: SubsetMask,
    pub ratio: f64,
    /// Largest target at which the decision failed and smallest at which it
    /// succeeded.
    pub window: (f64, f64),
    /// False when the decision never succeeded and `set` is the best trivial cut.
    pub certified: bool,
    pub decisions: u64,
    pub queries: u64,
}

/// Geometric binary search over the target `B`, driving [`ssc_decide`].
///
/// The upper end starts at the best ratio among single elements and their
/// complements, the lower end at `2^-60` times that. The search stops once
/// `hi / lo <= 1 + rel_gap`.
pub fn ssc_approximate<F: SetFunction>(
    inst: &SscInstance<F>,
    p: f64,
    rel_gap: f64,
    opts: &DecisionOptions,
    seed: u64,
) -> Result<SscApproximation, CutError> {
    let n = inst.ground_size();
    check_size(n)?;
    if !(rel_gap.is_finite() && rel_gap > 0.0) {
        return Err(CutError::Parameter(format!("rel_gap must be positive, got {rel_gap}")));
    }
    let mut ctx = EvalContext::new();
    let mut best: Option<(SubsetMask, f64)> = None;
    for v in 0..n {
        let single = SubsetMask::singleton(n, v)?;
        for cut in [single.complement(), single] {
            let r = inst.ratio(&mut ctx, &cut)?;
            if r.is_finite() && best.as_ref().map_or(true, |(_, b)| r < *b) {
                best = Some((cut, r));
            }
        }
    }
    let (mut set, mut ratio) = best.ok_or_else(|| CutError::Instance("no cut separates any demand".into()))?;
    let mut hi = ratio;
    if hi <= 0.0 {
        return Ok(SscApproximation {
            set,
            ratio,
            window: (0.0, 0.0),
            certified: true,
            decisions: 0,
            queries: ctx.queries(),
        });
    }
    let mut lo = hi * 2f64.powi(-60);
    let mut decisions = 0u64;
    let mut decide = |b: f64, ctx: &mut EvalContext| -> Result<Option<(SubsetMask, f64)>, CutError> {
        let out = ssc_decide(inst, b, p, opts, derive_seed(seed, decisions))?;
        decisions += 1;
        ctx.absorb(out.queries);
        let ratio = out.objective;
        Ok(out.into_solution().zip(ratio))
    };

    let Some(first) = decide(hi, &mut ctx)? else {
        return Ok(SscApproximation {
            set,
            ratio,
            window: (lo, hi),
            certified: false,
            decisions: 1,
            queries: ctx.queries(),
        });
    };
    if first.1 < ratio {
        (set, ratio) = first;
    }
    while hi / lo > 1.0 + rel_gap {
        let mid = (lo * hi).sqrt();
        match decide(mid, &mut ctx)? {
            Some((t, r)) => {
                hi = mid;
                if r < ratio {
                    set = t;
                    ratio = r;
                }
            }
            None => lo = mid,
        }
    }
    Ok(SscApproximation {
        set,
        ratio,
        window: (lo, hi),
        certified: true,
        decisions,
        queries: ctx.queries(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::{DemandPair, Demands};
    use crate::decision::BudgetPolicy;
    use crate::oracle::{FnOracle, OracleFlags};
    use crate::zoo::{GraphCut, HardPairF1F2};

    fn two_cliques() -> GraphCut {
        let mut edges = Vec::new();
        for base in [0, 5] {
            for u in 0..5 {
                for v in u + 1..5 {
                    edges.push((base + u, base + v, 1.0));
                }
            }
        }
        edges.push((4, 5, 1.0));
        GraphCut::new(10, &edges).unwrap()
    }

    #[test]
    fn fast_weights_examples() {
        let s = SubsetMask::from_indices(4, [0, 1]).unwrap();
        assert_eq!(weighted_ssc_fast_weights(&s, &[1.0; 4]), vec![2.0, 2.0, -2.0, -2.0]);
        let w = weighted_ssc_fast_weights(&s, &[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(w[0], 0.0);
        let w = weighted_ssc_fast_weights(&SubsetMask::empty(4), &[1.0; 4]);
        assert!(w.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_function_returns_a_separating_cut() {
        let f = FnOracle::new(6, OracleFlags::symmetric(), |_: &SubsetMask| 0.0);
        let pairs = vec![DemandPair::new(0, 5, 1.0).unwrap()];
        let inst = SscInstance::new(&f, Demands::Pairs(pairs)).unwrap();
        let out = ssc_decide(&inst, 0.1, 0.9, &DecisionOptions::default(), 3).unwrap();
        let t = out.solution().unwrap();
        assert!(t.contains(0) != t.contains(5));
        assert_eq!(out.objective, Some(0.0));
    }

    #[test]
    fn tiny_target_on_f1_fails() {
        // every cut of f1 has ratio at least 1/14; 4√(n/ln n)·B stays below that
        let pair = HardPairF1F2::with_seed(8, 3, 0).unwrap();
        let inst = SscInstance::uniform(pair.f1()).unwrap();
        let b = 0.9 / (14.0 * 4.0 * sqrt_n_over_ln_n(8));
        let opts = DecisionOptions::with_budget(BudgetPolicy::capped(300));
        let out = ssc_decide(&inst, b, 0.9, &opts, 1).unwrap();
        assert_eq!(out.status, Decision::Fail(FailReason::BudgetExhausted));
        assert_eq!(out.iterations, 300);
    }

    #[test]
    fn planted_cut_certificate_and_reproducibility() {
        let g = two_cliques();
        let inst = SscInstance::uniform(&g).unwrap();
        let b = 1.1 / 25.0;
        let opts = DecisionOptions::with_budget(BudgetPolicy::capped(2000));
        let a = ssc_decide(&inst, b, 0.9, &opts, 42).unwrap();
        let again = ssc_decide(&inst, b, 0.9, &opts, 42).unwrap();
        assert_eq!(a, again);
        let t = a.solution().expect("planted instance should be found");
        let ratio = g.value(t) / inst.separated(t);
        assert!(ratio < 4.0 * sqrt_n_over_ln_n(10) * b);
        assert!((a.objective.unwrap() - ratio).abs() < 1e-12);
    }

    #[test]
    fn approximation_of_zero_function_is_immediate() {
        let f = FnOracle::new(5, OracleFlags::symmetric(), |_: &SubsetMask| 0.0);
        let inst = SscInstance::uniform(&f).unwrap();
        let a = ssc_approximate(&inst, 0.9, 0.05, &DecisionOptions::default(), 0).unwrap();
        assert_eq!(a.ratio, 0.0);
        assert_eq!(a.decisions, 0);
    }

    #[test]
    fn approximation_brackets_the_planted_cut() {
        let g = two_cliques();
        let inst = SscInstance::uniform(&g).unwrap();
        let opts = DecisionOptions::with_budget(BudgetPolicy::capped(100));
        let a = ssc_approximate(&inst, 0.9, 0.05, &opts, 9).unwrap();
        assert!(a.certified);
        assert!(a.window.1 / a.window.0 <= 1.05 + 1e-12);
        assert!(a.ratio < 4.0 * sqrt_n_over_ln_n(10) * a.window.1);
        assert!(a.ratio >= 1.0 / 25.0 - 1e-12);
    }
}
