use serde::{Deserialize, Serialize};

use super::{ssc_approximate, CutError, Demands, SscInstance};
use crate::decision::{check_probability, derive_seed, BudgetPolicy, DecisionOptions};
use crate::oracle::{check_weights, EvalContext, SetFunction, SubsetMask};

/// Settings for the inner approximate sparsest-cut calls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbcOptions {
    /// Success probability of the whole run; each inner call gets `p^(1/2n)`.
    pub p: f64,
    pub rel_gap: f64,
    pub inner: DecisionOptions,
}

impl Default for SbcOptions {
    fn default() -> Self {
        SbcOptions {
            p: 0.9,
            rel_gap: 0.05,
            inner: DecisionOptions::with_budget(BudgetPolicy::capped(200)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbcResult {
    pub set: SubsetMask,
    pub f_value: f64,
    /// `min(w(T), w(V∖T)) / w(V)`.
    pub balance_achieved: f64,
    /// The sides taken in each round, in order.
    pub pieces: Vec<SubsetMask>,
    /// Binary-search window of every inner sparsest-cut call.
    pub windows: Vec<(f64, f64)>,
    pub queries: u64,
}

fn check_inputs<F: SetFunction>(f: &F, w: &[f64], b_prime: f64, max_b: f64, opts: &SbcOptions) -> Result<f64, CutError> {
    let n = f.ground_size();
    check_weights(n, w)?;
    if w.iter().any(|&x| x < 0.0) {
        return Err(CutError::Instance("weights must be nonnegative".into()));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(CutError::Instance("total weight must be positive".into()));
    }
    if !(b_prime > 0.0 && b_prime <= max_b) {
        return Err(CutError::Parameter(format!("b' must lie in (0, {max_b}], got {b_prime}")));
    }
    if !check_probability(opts.p) {
        return Err(CutError::Parameter(format!("p must lie in (0, 1), got {}", opts.p)));
    }
    Ok(total)
}

/// One round: an approximate weighted sparsest cut under residual weights.
fn residual_cut<F: SetFunction>(
    f: &F,
    residual: &[f64],
    opts: &SbcOptions,
    seed: u64,
    ctx: &mut EvalContext,
    windows: &mut Vec<(f64, f64)>,
) -> Result<SubsetMask, CutError> {
    if residual.iter().filter(|&&x| x > 0.0).count() < 2 {
        return Err(CutError::InfiniteRatio);
    }
    let n = f.ground_size();
    let inst = SscInstance::new(f, Demands::Product(residual.to_vec()))?;
    let p_inner = opts.p.powf(1.0 / (2.0 * n as f64));
    let approx = ssc_approximate(&inst, p_inner, opts.rel_gap, &opts.inner, seed)?;
    ctx.absorb(approx.queries);
    windows.push(approx.window);
    if inst.separated(&approx.set) <= 0.0 {
        return Err(CutError::InfiniteRatio);
    }
    Ok(approx.set)
}

fn zero_out(residual: &mut [f64], s: &SubsetMask) {
    for v in s.iter() {
        residual[v] = 0.0;
    }
}

fn finish<F: SetFunction>(
    f: &F,
    w: &[f64],
    set: SubsetMask,
    promised: f64,
    pieces: Vec<SubsetMask>,
    windows: Vec<(f64, f64)>,
    mut ctx: EvalContext,
) -> Result<SbcResult, CutError> {
    let total: f64 = w.iter().sum();
    let inside = set.weight(w);
    let balance_achieved = inside.min(total - inside) / total;
    if balance_achieved < promised - 1e-12 {
        return Err(CutError::Instance(format!(
            "balance {balance_achieved} fell below the promised {promised}"
        )));
    }
    let f_value = ctx.evaluate(f, &set)?;
    Ok(SbcResult { set, f_value, balance_achieved, pieces, windows, queries: ctx.queries() })
}

/// Balanced cut for symmetric functions; returns a `b'`-balanced cut.
pub fn sbc_symmetric<F: SetFunction>(
    f: &F,
    w: &[f64],
    b_prime: f64,
    opts: &SbcOptions,
    seed: u64,
) -> Result<SbcResult, CutError> {
    if !f.flags().symmetric {
        return Err(CutError::Instance("function is not flagged symmetric".into()));
    }
    let total = check_inputs(f, w, b_prime, 1.0 / 3.0, opts)?;
    let n = f.ground_size();
    let mut residual = w.to_vec();
    let mut t = SubsetMask::empty(n);
    let mut pieces = Vec::new();
    let mut windows = Vec::new();
    let mut ctx = EvalContext::new();
    let mut round = 0u64;
    while residual.iter().sum::<f64>() > (1.0 - b_prime) * total {
        if round as usize >= 2 * n {
            return Err(CutError::NoTermination(2 * n));
        }
        let s = residual_cut(f, &residual, opts, derive_seed(seed, round), &mut ctx, &mut windows)?;
        let lighter = if s.weight(&residual) <= s.complement().weight(&residual) { s } else { s.complement() };
        zero_out(&mut residual, &lighter);
        t = t.union(&lighter);
        pieces.push(lighter);
        round += 1;
    }
    finish(f, w, t, b_prime, pieces, windows, ctx)
}

/// Balanced cut for arbitrary nonnegative functions; returns a
/// `b'/2`-balanced cut.
pub fn sbc_general<F: SetFunction>(
    f: &F,
    w: &[f64],
    b_prime: f64,
    opts: &SbcOptions,
    seed: u64,
) -> Result<SbcResult, CutError> {
    let total = check_inputs(f, w, b_prime, 0.5, opts)?;
    let n = f.ground_size();
    let mut residual = w.to_vec();
    let mut t1 = SubsetMask::empty(n);
    let mut t2 = SubsetMask::empty(n);
    let mut pieces = Vec::new();
    let mut windows = Vec::new();
    let mut ctx = EvalContext::new();
    let mut round = 0u64;
    while residual.iter().sum::<f64>() > (1.0 - b_prime) * total {
        if round as usize >= 2 * n {
            return Err(CutError::NoTermination(2 * n));
        }
        let s = residual_cut(f, &residual, opts, derive_seed(seed, round), &mut ctx, &mut windows)?;
        let rest = s.complement();
        if s.weight(&residual) <= rest.weight(&residual) {
            zero_out(&mut residual, &s);
            t1 = t1.union(&s);
            pieces.push(s);
        } else {
            zero_out(&mut residual, &rest);
            t2 = t2.union(&rest);
            pieces.push(rest);
        }
        round += 1;
    }
    let set = if t1.weight(w) >= t2.weight(w) { t1 } else { t2.complement() };
    finish(f, w, set, b_prime / 2.0, pieces, windows, ctx)
}
