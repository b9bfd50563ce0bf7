use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::cut::SscInstance;
use crate::oracle::{EvalContext, SetFunction, SubsetMask};
use crate::partition::SmlInstance;

/// Largest ground set for the subset problems.
pub const BRUTE_SUBSET_LIMIT: usize = 16;
/// Largest ground set for load balancing.
pub const BRUTE_PARTITION_LIMIT: usize = 12;
/// Largest number of machines for load balancing.
pub const BRUTE_MACHINE_LIMIT: usize = 4;

pub enum BruteProblem<'a, F> {
    Ssc(&'a SscInstance<F>),
    /// Minimize `f(S)` subject to `min(w(S), w(V \ S)) >= balance·w(V)`.
    Sbc { oracle: &'a F, weights: &'a [f64], balance: f64 },
    Sml(&'a SmlInstance<F>),
    Slb { oracle: &'a F, m: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Witness {
    Set(SubsetMask),
    Partition(Vec<SubsetMask>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteOptimum {
    pub value: f64,
    pub witness: Witness,
    /// Sets or partitions examined.
    pub candidates: u64,
    pub queries: u64,
}

fn value_table<F: SetFunction + ?Sized>(f: &F, limit: usize, what: &'static str) -> Result<(Vec<f64>, u64), VerifyError> {
    let n = f.ground_size();
    if n > limit {
        return Err(VerifyError::TooLarge { what, n, limit });
    }
    let mut ctx = EvalContext::new();
    let mut table = Vec::with_capacity(1 << n);
    for word in 0..(1u64 << n) {
        table.push(ctx.evaluate(f, &SubsetMask::from_word(n, word)?)?);
    }
    Ok((table, ctx.queries()))
}

/// Minimum of `score` over all masks it accepts; ties keep the smallest word.
fn best_set(
    n: usize,
    words: impl Iterator<Item = u64>,
    mut score: impl FnMut(u64) -> Option<f64>,
) -> Option<(f64, SubsetMask, u64)> {
    let mut best: Option<(f64, u64)> = None;
    let mut seen = 0;
    for w in words {
        if let Some(v) = score(w) {
            seen += 1;
            if best.map_or(true, |(b, _)| v < b) {
                best = Some((v, w));
            }
        }
    }
    best.map(|(v, w)| (v, SubsetMask::from_word(n, w).expect("in range"), seen))
}

/// Exact optimum by enumeration of every feasible set or partition.
pub fn brute_force_optimum<F: SetFunction>(problem: BruteProblem<'_, F>) -> Result<BruteOptimum, VerifyError> {
    match problem {
        BruteProblem::Ssc(inst) => {
            let f = inst.oracle();
            let n = f.ground_size();
            let (table, queries) = value_table(f, BRUTE_SUBSET_LIMIT, "brute-force sparsest cut")?;
            let found = best_set(n, 0..table.len() as u64, |w| {
                let sep = inst.separated(&SubsetMask::from_word(n, w).expect("in range"));
                (sep > 0.0).then(|| table[w as usize] / sep)
            });
            finish(found, queries, "no cut separates any demand")
        }
        BruteProblem::Sbc { oracle, weights, balance } => {
            let n = oracle.ground_size();
            if weights.len() != n {
                return Err(VerifyError::Parameter(format!("{} weights for {n} elements", weights.len())));
            }
            if !(balance > 0.0 && balance <= 0.5) {
                return Err(VerifyError::Parameter(format!("balance must lie in (0, 1/2], got {balance}")));
            }
            let (table, queries) = value_table(oracle, BRUTE_SUBSET_LIMIT, "brute-force balanced cut")?;
            let total: f64 = weights.iter().sum();
            let found = best_set(n, 0..table.len() as u64, |w| {
                let inside = SubsetMask::from_word(n, w).expect("in range").weight(weights);
                (inside.min(total - inside) >= balance * total - 1e-12).then(|| table[w as usize])
            });
            finish(found, queries, "no cut meets the balance requirement")
        }
        BruteProblem::Sml(inst) => {
            let f = inst.oracle();
            let n = f.ground_size();
            let (table, queries) = value_table(f, BRUTE_SUBSET_LIMIT, "brute-force lower-bounded minimization")?;
            let weighted = inst.weighted().as_word().expect("within word limit");
            let target = inst.target_weight();
            let found = best_set(n, 0..table.len() as u64, |w| {
                ((w & weighted).count_ones() as usize >= target).then(|| table[w as usize])
            });
            finish(found, queries, "no set reaches the target weight")
        }
        BruteProblem::Slb { oracle, m } => slb(oracle, m),
    }
}

fn finish(found: Option<(f64, SubsetMask, u64)>, queries: u64, none: &str) -> Result<BruteOptimum, VerifyError> {
    let (value, set, candidates) = found.ok_or_else(|| VerifyError::Infeasible(none.into()))?;
    Ok(BruteOptimum { value, witness: Witness::Set(set), candidates, queries })
}

/// Enumerates set partitions into at most `m` blocks as restricted-growth
/// strings: element 0 sits in block 0 and new blocks open in order.
fn slb<F: SetFunction>(f: &F, m: usize) -> Result<BruteOptimum, VerifyError> {
    let n = f.ground_size();
    if m == 0 {
        return Err(VerifyError::Parameter("m must be at least 1".into()));
    }
    if m > BRUTE_MACHINE_LIMIT {
        return Err(VerifyError::TooLarge { what: "brute-force load balancing machines", n: m, limit: BRUTE_MACHINE_LIMIT });
    }
    let (table, queries) = value_table(f, BRUTE_PARTITION_LIMIT, "brute-force load balancing")?;
    let mut search = SlbSearch { n, m, table: &table, blocks: vec![0; m], best: f64::INFINITY, best_blocks: Vec::new(), seen: 0 };
    search.assign(0, 0);
    let blocks = search
        .best_blocks
        .iter()
        .map(|&w| SubsetMask::from_word(n, w).expect("in range"))
        .collect();
    Ok(BruteOptimum { value: search.best, witness: Witness::Partition(blocks), candidates: search.seen, queries })
}

struct SlbSearch<'a> {
    n: usize,
    m: usize,
    table: &'a [f64],
    blocks: Vec<u64>,
    best: f64,
    best_blocks: Vec<u64>,
    seen: u64,
}

impl SlbSearch<'_> {
    fn assign(&mut self, v: usize, used: usize) {
        if v == self.n {
            self.seen += 1;
            // idle machines carry f(∅)
            let mut makespan = if used < self.m { self.table[0] } else { f64::NEG_INFINITY };
            for &b in &self.blocks[..used] {
                makespan = makespan.max(self.table[b as usize]);
            }
            if makespan < self.best {
                self.best = makespan;
                self.best_blocks = self.blocks.clone();
            }
            return;
        }
        let open = if used < self.m { used + 1 } else { used };
        for j in 0..open {
            self.blocks[j] |= 1 << v;
            self.assign(v + 1, used.max(j + 1));
            self.blocks[j] &= !(1 << v);
        }
    }
}
