use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::decision::{derive_seed, rng_from};
use crate::oracle::{SetFunction, SubsetMask};
use crate::zoo::{random_subset, HardPairF1F2, HardPairF3F4, HardPairF5F6};

/// Parameters of a hard pair; the hidden randomness comes from a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "pair", rename_all = "snake_case")]
pub enum PairSpec {
    F1F2 { n: usize, beta: usize },
    F3F4 { n: usize, alpha: usize, beta: usize },
    F5F6 { n: usize, m: usize, beta: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuiltPair {
    F1F2(HardPairF1F2),
    F3F4(HardPairF3F4),
    F5F6(HardPairF5F6),
}

impl PairSpec {
    pub fn n(&self) -> usize {
        match *self {
            PairSpec::F1F2 { n, .. } | PairSpec::F3F4 { n, .. } | PairSpec::F5F6 { n, .. } => n,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            PairSpec::F1F2 { .. } => "f1f2",
            PairSpec::F3F4 { .. } => "f3f4",
            PairSpec::F5F6 { .. } => "f5f6",
        }
    }

    pub fn build(&self, seed: u64) -> Result<BuiltPair, VerifyError> {
        Ok(match *self {
            PairSpec::F1F2 { n, beta } => BuiltPair::F1F2(HardPairF1F2::with_seed(n, beta, seed)?),
            PairSpec::F3F4 { n, alpha, beta } => BuiltPair::F3F4(HardPairF3F4::with_seed(n, alpha, beta, seed)?),
            PairSpec::F5F6 { n, m, beta } => BuiltPair::F5F6(HardPairF5F6::with_seed(n, m, beta, seed)?),
        })
    }

    /// Size of the hidden set and whether a set with `s` elements, `k` of them
    /// hidden, gets different values. `None` for f5/f6, whose hidden structure
    /// is a partition.
    fn size_rule(&self) -> Option<(usize, Box<dyn Fn(usize, usize) -> bool + Send + Sync>)> {
        match *self {
            PairSpec::F1F2 { n, beta } => {
                let half = n / 2;
                Some((half, Box::new(move |s, k| (beta + k).min(beta + s - k) < s.min(half))))
            }
            PairSpec::F3F4 { alpha, beta, .. } => Some((alpha, Box::new(move |s, k| beta + s - k < s.min(alpha)))),
            PairSpec::F5F6 { .. } => None,
        }
    }
}

impl BuiltPair {
    pub fn n(&self) -> usize {
        match self {
            BuiltPair::F1F2(p) => p.n(),
            BuiltPair::F3F4(p) => p.n(),
            BuiltPair::F5F6(p) => p.n(),
        }
    }

    /// `(first, second)` where the second function carries the hidden structure.
    pub fn values(&self, s: &SubsetMask) -> (f64, f64) {
        match self {
            BuiltPair::F1F2(p) => (p.f1().value(s), p.f2().value(s)),
            BuiltPair::F3F4(p) => (p.f3().value(s), p.f4().value(s)),
            BuiltPair::F5F6(p) => (p.f5().value(s), p.f6().value(s)),
        }
    }

    /// The hidden set, or the first hidden block.
    pub fn hidden(&self) -> &SubsetMask {
        match self {
            BuiltPair::F1F2(p) => p.hidden(),
            BuiltPair::F3F4(p) => p.hidden(),
            BuiltPair::F5F6(p) => &p.blocks()[0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum QueryStrategy {
    /// Each element joins independently with probability 1/2.
    RandomMasks,
    /// Uniform subsets of a fixed size.
    SizeTargeted { size: usize },
    EmptyOnly,
    /// Queries the hidden set itself, which an honest algorithm cannot do.
    RevealHidden,
}

impl QueryStrategy {
    fn is_fixed(self) -> bool {
        matches!(self, QueryStrategy::EmptyOnly | QueryStrategy::RevealHidden)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishReport {
    pub pair: PairSpec,
    pub strategy: QueryStrategy,
    pub trials: u64,
    pub queries_per_trial: u64,
    pub seed: u64,
    pub trials_with_any_value_difference: u64,
    pub separating_fraction: f64,
    /// Exact probability that one query separates the pair.
    pub per_query_separation_probability: Option<f64>,
    /// `1 - (1 - p)^queries`.
    pub per_trial_separation_probability: Option<f64>,
    /// Oracle pairs evaluated; a trial stops at its first separating query.
    pub queries_evaluated: u64,
}

fn fair_mask<R: RngCore>(rng: &mut R, n: usize) -> SubsetMask {
    let mut bits = 0u64;
    SubsetMask::from_fn(n, |v| {
        if v % 64 == 0 {
            bits = rng.next_u64();
        }
        bits >> (v % 64) & 1 == 1
    })
}

fn separates(pair: &BuiltPair, s: &SubsetMask) -> bool {
    let (a, b) = pair.values(s);
    a != b
}

/// Runs `trials` independent trials. Each draws fresh hidden randomness from
/// `derive_seed(seed, 2t)` and an independent query stream from
/// `derive_seed(seed, 2t + 1)`, then records whether any query separated the pair.
pub fn distinguish_experiment(
    spec: PairSpec,
    strategy: QueryStrategy,
    queries: u64,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<DistinguishReport, VerifyError> {
    let n = spec.n();
    if let QueryStrategy::SizeTargeted { size } = strategy {
        if size > n {
            return Err(VerifyError::Parameter(format!("query size {size} exceeds n = {n}")));
        }
    }
    spec.build(seed)?;
    let run = |t: u64| -> Result<(bool, u64), VerifyError> {
        let pair = spec.build(derive_seed(seed, 2 * t))?;
        let mut rng = rng_from(derive_seed(seed, 2 * t + 1));
        let fixed = match strategy {
            QueryStrategy::EmptyOnly => Some(SubsetMask::empty(n)),
            QueryStrategy::RevealHidden => Some(pair.hidden().clone()),
            _ => None,
        };
        if let Some(s) = fixed {
            return Ok((queries > 0 && separates(&pair, &s), queries.min(1)));
        }
        for i in 0..queries {
            let s = match strategy {
                QueryStrategy::SizeTargeted { size } => random_subset(&mut rng, n, size),
                _ => fair_mask(&mut rng, n),
            };
            if separates(&pair, &s) {
                return Ok((true, i + 1));
            }
        }
        Ok((false, queries))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| VerifyError::Parameter(format!("thread pool: {e}")))?;
    let outcomes: Vec<(bool, u64)> =
        pool.install(|| (0..trials).into_par_iter().map(run).collect::<Result<_, _>>())?;
    let hits = outcomes.iter().filter(|o| o.0).count() as u64;
    let evaluated = outcomes.iter().map(|o| o.1).sum();
    let per_query = separation_probability(&spec, strategy)?;
    let effective_queries = if strategy.is_fixed() { queries.min(1) } else { queries };
    let per_trial = per_query.map(|p| -((effective_queries as f64) * (-p).ln_1p()).exp_m1());
    Ok(DistinguishReport {
        pair: spec,
        strategy,
        trials,
        queries_per_trial: queries,
        seed,
        trials_with_any_value_difference: hits,
        separating_fraction: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
        per_query_separation_probability: per_query,
        per_trial_separation_probability: per_trial,
        queries_evaluated: evaluated,
    })
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for i in 0..n {
        let next = row[i].clone() * (n - i) / (i + 1);
        row.push(next);
    }
    row
}

/// Exact per-query separation probability for pairs whose difference depends
/// only on `|S|` and `|S ∩ R|`.
pub fn separation_probability(spec: &PairSpec, strategy: QueryStrategy) -> Result<Option<f64>, VerifyError> {
    let Some((r, differ)) = spec.size_rule() else {
        return Ok(None);
    };
    let n = spec.n();
    let inside = binomial_row(r);
    let outside = binomial_row(n - r);
    let ratio = |num: BigUint, den: BigUint| {
        BigRational::new(num.into(), den.into()).to_f64().expect("probability is finite")
    };
    let p = match strategy {
        QueryStrategy::EmptyOnly => f64::from(u8::from(differ(0, 0))),
        QueryStrategy::RevealHidden => f64::from(u8::from(differ(r, r))),
        QueryStrategy::RandomMasks => {
            let mut num = BigUint::zero();
            for k in 0..=r {
                for j in 0..=n - r {
                    if differ(k + j, k) {
                        num += &inside[k] * &outside[j];
                    }
                }
            }
            ratio(num, BigUint::from(1u32) << n)
        }
        QueryStrategy::SizeTargeted { size } => {
            if size > n {
                return Err(VerifyError::Parameter(format!("query size {size} exceeds n = {n}")));
            }
            let mut num = BigUint::zero();
            for k in size.saturating_sub(n - r)..=size.min(r) {
                if differ(size, k) {
                    num += &inside[k] * &outside[size - k];
                }
            }
            ratio(num, binomial_row(n)[size].clone())
        }
    };
    Ok(Some(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    const F3F4: PairSpec = PairSpec::F3F4 { n: 400, alpha: 40, beta: 8 };

    #[test]
    fn empty_queries_never_separate() {
        for spec in [
            PairSpec::F1F2 { n: 12, beta: 4 },
            PairSpec::F3F4 { n: 20, alpha: 8, beta: 3 },
            PairSpec::F5F6 { n: 12, m: 3, beta: 2 },
        ] {
            let r = distinguish_experiment(spec, QueryStrategy::EmptyOnly, 10, 20, 5, Some(2)).unwrap();
            assert_eq!(r.trials_with_any_value_difference, 0);
        }
    }

    #[test]
    fn revealing_the_hidden_set_always_separates() {
        for spec in [
            PairSpec::F1F2 { n: 12, beta: 4 },
            F3F4,
            PairSpec::F5F6 { n: 12, m: 3, beta: 2 },
        ] {
            let r = distinguish_experiment(spec, QueryStrategy::RevealHidden, 1, 10, 5, Some(2)).unwrap();
            assert_eq!(r.trials_with_any_value_difference, 10, "{spec:?}");
        }
        assert_eq!(separation_probability(&F3F4, QueryStrategy::RevealHidden).unwrap(), Some(1.0));
    }

    #[test]
    fn size_targeted_probability_is_the_hypergeometric_tail() {
        // P[|S ∩ R| > 8] for a uniform 40-subset of 400 with |R| = 40
        let p = separation_probability(&F3F4, QueryStrategy::SizeTargeted { size: 40 }).unwrap().unwrap();
        let mut direct = 0.0;
        let lnc = |a: usize, b: usize| -> f64 { (1..=b).map(|i| ((a - b + i) as f64).ln() - (i as f64).ln()).sum() };
        for k in 9..=40 {
            direct += (lnc(40, k) + lnc(360, 40 - k) - lnc(400, 40)).exp();
        }
        assert!((p - direct).abs() < 1e-12, "{p} vs {direct}");
        assert!(p > 0.005 && p < 0.05);
    }

    #[test]
    fn fair_coin_masks_are_essentially_never_separating() {
        let p = separation_probability(&F3F4, QueryStrategy::RandomMasks).unwrap().unwrap();
        assert!(p < 1e-40);
        let r = distinguish_experiment(F3F4, QueryStrategy::RandomMasks, 200, 8, 1, Some(2)).unwrap();
        assert_eq!(r.trials_with_any_value_difference, 0);
        assert_eq!(r.queries_evaluated, 1600);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let spec = PairSpec::F1F2 { n: 12, beta: 4 };
        let strat = QueryStrategy::SizeTargeted { size: 6 };
        let a = distinguish_experiment(spec, strat, 5, 40, 9, Some(1)).unwrap();
        let b = distinguish_experiment(spec, strat, 5, 40, 9, Some(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.trials_with_any_value_difference > 0);
    }
}
