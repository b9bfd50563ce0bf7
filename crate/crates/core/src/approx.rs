//! Approximating a monotone two-partition function everywhere.
//!
//! Random sets of every size are queried. If two sets of equal size disagree,
//! the function is not a function of `|S|` alone, and the hidden set `R` can be
//! recovered exactly from such a pair. Otherwise a three-piece function of
//! `|S|` is returned, which is within a factor `2√n` everywhere.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{check_probability, rng_from};
use crate::oracle::{EvalContext, OracleError, OracleFlags, SetFunction, SubsetMask, DEFAULT_TOLERANCE};
use crate::zoo::{TwoPartitionTable, ZooError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("recovery needs two sets of equal size with different values: {0}")]
    Precondition(String),
    #[error("not a two-partition function: f({set:?}) = {value} matches neither reference value {a} nor {b}")]
    NotTwoPartition { set: SubsetMask, value: f64, a: f64, b: f64 },
    #[error("recovered grid is invalid: {0}")]
    Table(#[from] ZooError),
    #[error("monotone submodular bound violated on {set:?}: {detail}")]
    Postcondition { set: SubsetMask, detail: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// How many random sets to draw per sampling probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleBudget {
    /// `⌈c·n·ln(4n/(1-p))⌉`.
    Scaled { c: f64 },
    /// `n^10 · ln(4n/(1-p))`, the count behind the success-probability bound.
    #[serde(rename = "paper")]
    Analytical,
    Fixed { per_size: u64 },
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget::Scaled { c: 200.0 }
    }
}

impl SampleBudget {
    pub fn per_size(self, n: usize, p: f64) -> u64 {
        let nf = n as f64;
        let log = (4.0 * nf / (1.0 - p)).ln();
        let count = match self {
            SampleBudget::Scaled { c } => c * nf * log,
            SampleBudget::Analytical => nf.powi(10) * log,
            SampleBudget::Fixed { per_size } => return per_size,
        };
        if count >= u64::MAX as f64 {
            u64::MAX
        } else {
            count.ceil() as u64
        }
    }
}

/// The output of [`approximate_everywhere`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ApproxFunction {
    /// `f(∅)` at `∅`, `f({j})` up to size `2√n`, `f(V)/(2√n)` above.
    PiecewiseBySize { n: usize, v_empty: f64, v_small: f64, v_large: f64 },
    ExactTable { table: TwoPartitionTable },
}

impl ApproxFunction {
    pub fn is_exact(&self) -> bool {
        matches!(self, ApproxFunction::ExactTable { .. })
    }
}

impl SetFunction for ApproxFunction {
    fn ground_size(&self) -> usize {
        match self {
            ApproxFunction::PiecewiseBySize { n, .. } => *n,
            ApproxFunction::ExactTable { table } => table.ground_size(),
        }
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        match self {
            ApproxFunction::PiecewiseBySize { n, v_empty, v_small, v_large } => {
                let size = s.len();
                if size == 0 {
                    *v_empty
                } else if size as f64 <= 2.0 * (*n as f64).sqrt() {
                    *v_small
                } else {
                    *v_large
                }
            }
            ApproxFunction::ExactTable { table } => table.value(s),
        }
    }

    fn flags(&self) -> OracleFlags {
        match self {
            ApproxFunction::PiecewiseBySize { .. } => OracleFlags::NONE,
            ApproxFunction::ExactTable { table } => table.flags(),
        }
    }
}

/// Queried sets of one cardinality.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SizeClass {
    pub size: usize,
    pub samples: Vec<(SubsetMask, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleLog {
    /// Entry `k` holds the queried sets of size `k`.
    pub classes: Vec<SizeClass>,
    pub samples_per_probability: u64,
    /// The first pair of equal-size sets with different values.
    pub collision: Option<(SubsetMask, SubsetMask)>,
    pub queries: u64,
}

impl SampleLog {
    fn new(n: usize, samples_per_probability: u64) -> Self {
        SampleLog {
            classes: (0..=n).map(|size| SizeClass { size, samples: Vec::new() }).collect(),
            samples_per_probability,
            collision: None,
            queries: 0,
        }
    }

    /// Records a query; returns a colliding earlier set of the same size.
    fn record(&mut self, s: SubsetMask, value: f64, tol: f64) -> Option<SubsetMask> {
        let class = &mut self.classes[s.len()];
        let clash = class
            .samples
            .first()
            .filter(|(_, first)| (first - value).abs() > tol)
            .map(|(first, _)| first.clone());
        class.samples.push((s, value));
        clash
    }
}

/// Queries `f` at random and returns an approximation within `2√n`
/// everywhere for monotone two-partition `f`.
pub fn approximate_everywhere<F: SetFunction + ?Sized>(
    f: &F,
    p: f64,
    budget: SampleBudget,
    seed: u64,
) -> Result<(ApproxFunction, SampleLog), ApproxError> {
    if !check_probability(p) {
        return Err(ApproxError::Parameter(format!("p must lie in (0, 1), got {p}")));
    }
    let n = f.ground_size();
    let tol = DEFAULT_TOLERANCE;
    let per_size = budget.per_size(n, p);
    let mut log = SampleLog::new(n, per_size);
    let mut ctx = EvalContext::new();
    let mut collision = None;

    let mut fixed = vec![SubsetMask::empty(n), SubsetMask::full(n)];
    fixed.extend((0..n).map(|v| SubsetMask::singleton(n, v).expect("in range")));
    for s in fixed {
        let value = ctx.evaluate(f, &s)?;
        if let Some(other) = log.record(s.clone(), value, tol) {
            collision.get_or_insert((other, s));
        }
    }
    let mut rng = rng_from(seed);
    'sizes: for i in 2..n {
        if collision.is_some() {
            break;
        }
        let q = i as f64 / n as f64;
        for _ in 0..per_size {
            let s = SubsetMask::from_fn(n, |_| rng.gen_bool(q));
            let value = ctx.evaluate(f, &s)?;
            if let Some(other) = log.record(s.clone(), value, tol) {
                collision = Some((other, s));
                break 'sizes;
            }
        }
    }

    if let Some((a, b)) = collision {
        log.collision = Some((a.clone(), b.clone()));
        let (table, queries) = recover_with_context(f, &a, &b)?;
        log.queries = ctx.queries() + queries;
        return Ok((ApproxFunction::ExactTable { table }, log));
    }

    let v_empty = log.classes[0].samples[0].1;
    let v_large_source = log.classes[n].samples[0].1;
    let v_small = log.classes[1].samples[0].1;
    // monotonicity and subadditivity against every sampled set
    for class in &log.classes[1..] {
        for (s, value) in &class.samples {
            if *value < v_small - tol {
                return Err(ApproxError::Postcondition {
                    set: s.clone(),
                    detail: format!("value {value} is below the singleton value {v_small}"),
                });
            }
            if *value > s.len() as f64 * v_small + tol {
                return Err(ApproxError::Postcondition {
                    set: s.clone(),
                    detail: format!("value {value} exceeds |S| times the singleton value {v_small}"),
                });
            }
        }
    }
    log.queries = ctx.queries();
    let v_large = v_large_source / (2.0 * (n as f64).sqrt());
    Ok((ApproxFunction::PiecewiseBySize { n, v_empty, v_small, v_large }, log))
}

/// Recovers a two-partition function exactly from two sets of equal size
/// with different values.
pub fn recover_exact<F: SetFunction + ?Sized>(
    f: &F,
    s: &SubsetMask,
    t: &SubsetMask,
) -> Result<TwoPartitionTable, ApproxError> {
    recover_with_context(f, s, t).map(|(table, _)| table)
}

fn recover_with_context<F: SetFunction + ?Sized>(
    f: &F,
    s: &SubsetMask,
    t: &SubsetMask,
) -> Result<(TwoPartitionTable, u64), ApproxError> {
    let n = f.ground_size();
    let tol = DEFAULT_TOLERANCE;
    let mut ctx = EvalContext::new();
    if s.len() != t.len() {
        return Err(ApproxError::Precondition(format!("|S| = {} but |T| = {}", s.len(), t.len())));
    }
    let fs = ctx.evaluate(f, s)?;
    let ft = ctx.evaluate(f, t)?;
    if (fs - ft).abs() <= tol {
        return Err(ApproxError::Precondition(format!("f(S) = f(T) = {fs}")));
    }

    // shared elements last, in the same order on both sides
    let common = s.intersection(t);
    let s_order: Vec<usize> = s.difference(t).iter().chain(common.iter()).collect();
    let t_order: Vec<usize> = t.difference(s).iter().chain(common.iter()).collect();
    let mut current = s.clone();
    let mut current_value = fs;
    let mut step = None;
    for i in 0..s_order.len() {
        let next = current.without(s_order[i]).with(t_order[i]);
        let next_value = ctx.evaluate(f, &next)?;
        if (next_value - current_value).abs() > tol {
            step = Some((i, current_value, next_value));
            break;
        }
        current = next;
        current_value = next_value;
    }
    let (i, a, b) = step.expect("the walk ends at T, whose value differs from f(S)");
    let (s_i, t_i) = (s_order[i], t_order[i]);
    let u = current.without(s_i);

    // s_i is named a member of R, t_i a non-member
    let classify = |value: f64, set: &SubsetMask, if_a: bool| -> Result<bool, ApproxError> {
        if (value - a).abs() <= tol {
            Ok(if_a)
        } else if (value - b).abs() <= tol {
            Ok(!if_a)
        } else {
            Err(ApproxError::NotTwoPartition { set: set.clone(), value, a, b })
        }
    };
    let mut hidden = SubsetMask::empty(n);
    hidden.insert(s_i);
    for j in 0..n {
        if j == s_i || j == t_i {
            continue;
        }
        if u.contains(j) {
            let probe = u.without(j).with(s_i).with(t_i);
            let value = ctx.evaluate(f, &probe)?;
            // replacing j by t_i keeps the value exactly when j is outside R
            if !classify(value, &probe, true)? {
                hidden.insert(j);
            }
        } else {
            let probe = u.with(j);
            let value = ctx.evaluate(f, &probe)?;
            if classify(value, &probe, true)? {
                hidden.insert(j);
            }
        }
    }

    let k_size = hidden.len();
    let l_size = n - k_size;
    let mut rows = Vec::with_capacity(k_size + 1);
    for k in 0..=k_size {
        let mut row = Vec::with_capacity(l_size + 1);
        for l in 0..=l_size {
            let probe = crate::zoo::two_partition_representative(&hidden, k, l);
            row.push(ctx.evaluate(f, &probe)?);
        }
        rows.push(row);
    }
    let table = TwoPartitionTable::from_grid(hidden, rows)?;
    Ok((table, ctx.queries()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use crate::zoo::Modular;

    fn min_k_one_plus_l() -> TwoPartitionTable {
        TwoPartitionTable::from_closed_form(4, 2, |k, l| k.min(1) as f64 + l as f64).unwrap()
    }

    fn all_masks(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..1u64 << n).map(move |w| SubsetMask::from_word(n, w).unwrap())
    }

    #[test]
    fn cardinality_gives_the_piecewise_form() {
        let f = Modular::cardinality(16);
        let (g, log) = approximate_everywhere(&f, 0.9, SampleBudget::Fixed { per_size: 50 }, 1).unwrap();
        assert_eq!(g, ApproxFunction::PiecewiseBySize { n: 16, v_empty: 0.0, v_small: 1.0, v_large: 2.0 });
        assert!(log.collision.is_none());
        for s in all_masks(16) {
            let (lo, hi) = (g.value(&s), f.value(&s));
            assert!(lo <= hi && hi <= 8.0 * lo);
        }
    }

    #[test]
    fn example_table_is_recovered_exactly() {
        let f = min_k_one_plus_l();
        let s = SubsetMask::from_indices(4, [0, 1]).unwrap();
        let t = SubsetMask::from_indices(4, [2, 3]).unwrap();
        let table = recover_exact(&f, &s, &t).unwrap();
        for m in all_masks(4) {
            assert_eq!(table.value(&m), f.value(&m));
        }
        let (g, log) = approximate_everywhere(&f, 0.9, SampleBudget::default(), 3).unwrap();
        assert!(g.is_exact() && log.collision.is_some());
        for m in all_masks(4) {
            assert_eq!(g.value(&m), f.value(&m));
        }
    }

    #[test]
    fn zero_function_is_all_zero() {
        let f = FnOracle::new(9, OracleFlags::monotone(), |_: &SubsetMask| 0.0);
        let (g, _) = approximate_everywhere(&f, 0.5, SampleBudget::Fixed { per_size: 10 }, 0).unwrap();
        assert!(all_masks(9).all(|s| g.value(&s) == 0.0));
    }

    #[test]
    fn recovery_preconditions() {
        let f = Modular::cardinality(5);
        let s = SubsetMask::from_indices(5, [0, 1]).unwrap();
        assert!(matches!(recover_exact(&f, &s, &s), Err(ApproxError::Precondition(_))));
        let t = SubsetMask::from_indices(5, [2, 3]).unwrap();
        assert!(matches!(recover_exact(&f, &s, &t), Err(ApproxError::Precondition(_))));
    }

    #[test]
    fn three_valued_function_is_not_two_partition() {
        // weights 1, 2, 3 on the first three elements
        let f = Modular::new(vec![1.0, 2.0, 3.0, 0.0]).unwrap();
        let s = SubsetMask::from_indices(4, [0]).unwrap();
        let t = SubsetMask::from_indices(4, [1]).unwrap();
        assert!(matches!(recover_exact(&f, &s, &t), Err(ApproxError::NotTwoPartition { .. })));
    }

    #[test]
    fn approximate_function_round_trips_through_json() {
        let g = ApproxFunction::ExactTable { table: min_k_one_plus_l() };
        let back: ApproxFunction = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
