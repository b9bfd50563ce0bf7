use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::decision::rng_from;
use crate::oracle::{EvalContext, SetFunction, SubsetMask, DEFAULT_TOLERANCE};

/// Largest ground set checked exhaustively.
pub const EXHAUSTIVE_STRUCTURE_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StructureMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

/// `f(S+a+b) - f(S+b) > f(S+a) - f(S)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalWitness {
    pub set: SubsetMask,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub submodular: bool,
    pub submodular_witness: Option<MarginalWitness>,
    pub monotone: bool,
    /// `f(S + v) < f(S)`.
    pub monotone_witness: Option<(SubsetMask, usize)>,
    pub symmetric: bool,
    pub symmetric_witness: Option<SubsetMask>,
    pub nonnegative: bool,
    pub nonnegative_witness: Option<SubsetMask>,
    pub mode: StructureMode,
    /// `2^n` sets in exhaustive mode, the sample count otherwise.
    pub checked_universe: u64,
    /// Number of `(S, a, b)` triples examined.
    pub triples_checked: u64,
    pub queries: u64,
}

impl MarginalWitness {
    /// Re-evaluates the violation.
    pub fn violates<F: SetFunction + ?Sized>(&self, f: &F, tol: f64) -> bool {
        let s = &self.set;
        let sa = s.with(self.a);
        let sb = s.with(self.b);
        let sab = sa.with(self.b);
        f.value(&sab) - f.value(&sb) > f.value(&sa) - f.value(s) + tol
    }
}

#[derive(Default)]
struct Findings {
    submodular: Option<MarginalWitness>,
    monotone: Option<(SubsetMask, usize)>,
    symmetric: Option<SubsetMask>,
    nonnegative: Option<SubsetMask>,
    triples: u64,
}

impl Findings {
    fn into_report(self, mode: StructureMode, checked_universe: u64, queries: u64) -> StructuralReport {
        StructuralReport {
            submodular: self.submodular.is_none(),
            submodular_witness: self.submodular,
            monotone: self.monotone.is_none(),
            monotone_witness: self.monotone,
            symmetric: self.symmetric.is_none(),
            symmetric_witness: self.symmetric,
            nonnegative: self.nonnegative.is_none(),
            nonnegative_witness: self.nonnegative,
            mode,
            checked_universe,
            triples_checked: self.triples,
            queries,
        }
    }
}

/// Checks submodularity in its two-element form, plus monotonicity,
/// symmetry and nonnegativity. The first violation of each kind is kept.
pub fn check_structure<F: SetFunction + ?Sized>(f: &F, mode: StructureMode) -> Result<StructuralReport, VerifyError> {
    match mode {
        StructureMode::Exhaustive => exhaustive(f, mode),
        StructureMode::Sampled { count, seed } => sampled(f, mode, count, seed),
    }
}

fn exhaustive<F: SetFunction + ?Sized>(f: &F, mode: StructureMode) -> Result<StructuralReport, VerifyError> {
    let n = f.ground_size();
    if n > EXHAUSTIVE_STRUCTURE_LIMIT {
        return Err(VerifyError::TooLarge { what: "exhaustive structure check", n, limit: EXHAUSTIVE_STRUCTURE_LIMIT });
    }
    let tol = DEFAULT_TOLERANCE;
    let mut ctx = EvalContext::new();
    let full = (1u64 << n) - 1;
    let mut table = Vec::with_capacity(1 << n);
    for word in 0..=full {
        table.push(ctx.evaluate(f, &SubsetMask::from_word(n, word)?)?);
    }
    let mask = |w: u64| SubsetMask::from_word(n, w).expect("in range");
    let mut found = Findings::default();
    for word in 0..=full {
        let v = table[word as usize];
        if found.nonnegative.is_none() && v < -tol {
            found.nonnegative = Some(mask(word));
        }
        if found.symmetric.is_none() && (v - table[(full ^ word) as usize]).abs() > tol {
            found.symmetric = Some(mask(word));
        }
        for a in 0..n {
            let abit = 1u64 << a;
            if word & abit != 0 {
                continue;
            }
            let va = table[(word | abit) as usize];
            if found.monotone.is_none() && va < v - tol {
                found.monotone = Some((mask(word), a));
            }
            for b in a + 1..n {
                let bbit = 1u64 << b;
                if word & bbit != 0 {
                    continue;
                }
                found.triples += 1;
                let vb = table[(word | bbit) as usize];
                let vab = table[(word | abit | bbit) as usize];
                if found.submodular.is_none() && vab - vb > va - v + tol {
                    found.submodular = Some(MarginalWitness { set: mask(word), a, b });
                }
            }
        }
    }
    Ok(found.into_report(mode, full + 1, ctx.queries()))
}

fn sampled<F: SetFunction + ?Sized>(f: &F, mode: StructureMode, count: u64, seed: u64) -> Result<StructuralReport, VerifyError> {
    let n = f.ground_size();
    let tol = DEFAULT_TOLERANCE;
    let mut ctx = EvalContext::new();
    let mut rng = rng_from(seed);
    let mut found = Findings::default();
    for _ in 0..count {
        let s = SubsetMask::from_fn(n, |_| rng.gen_bool(0.5));
        let v = ctx.evaluate(f, &s)?;
        if found.nonnegative.is_none() && v < -tol {
            found.nonnegative = Some(s.clone());
        }
        if found.symmetric.is_none() && (v - ctx.evaluate(f, &s.complement())?).abs() > tol {
            found.symmetric = Some(s.clone());
        }
        let outside: Vec<usize> = (0..n).filter(|&x| !s.contains(x)).collect();
        if outside.is_empty() {
            continue;
        }
        let a = outside[rng.gen_range(0..outside.len())];
        let va = ctx.evaluate(f, &s.with(a))?;
        if found.monotone.is_none() && va < v - tol {
            found.monotone = Some((s.clone(), a));
        }
        if outside.len() < 2 {
            continue;
        }
        let pick = index::sample(&mut rng, outside.len(), 2);
        let (a, b) = (outside[pick.index(0)], outside[pick.index(1)]);
        let (a, b) = (a.min(b), a.max(b));
        let va = ctx.evaluate(f, &s.with(a))?;
        let vb = ctx.evaluate(f, &s.with(b))?;
        let vab = ctx.evaluate(f, &s.with(a).with(b))?;
        found.triples += 1;
        if found.submodular.is_none() && vab - vb > va - v + tol {
            found.submodular = Some(MarginalWitness { set: s, a, b });
        }
    }
    Ok(found.into_report(mode, count, ctx.queries()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnOracle, OracleFlags};
    use crate::zoo::HardPairF1F2;

    #[test]
    fn f2_is_symmetric_submodular_nonnegative() {
        let pair = HardPairF1F2::with_seed(8, 3, 1).unwrap();
        let r = check_structure(&pair.f2(), StructureMode::Exhaustive).unwrap();
        assert!(r.submodular && r.symmetric && r.nonnegative, "{r:?}");
        assert!(!r.monotone);
        assert_eq!(r.queries, 256);
    }

    #[test]
    fn squared_size_is_caught_at_the_empty_set() {
        let f = FnOracle::new(4, OracleFlags::NONE, |s: &SubsetMask| (s.len() * s.len()) as f64);
        let r = check_structure(&f, StructureMode::Exhaustive).unwrap();
        let w = r.submodular_witness.clone().unwrap();
        assert_eq!((w.set, w.a, w.b), (SubsetMask::empty(4), 0, 1));
        assert!(r.submodular_witness.unwrap().violates(&f, 1e-9));
        assert!(r.monotone);
    }

    #[test]
    fn zero_function_passes_everything() {
        let f = FnOracle::new(5, OracleFlags::NONE, |_: &SubsetMask| 0.0);
        for mode in [StructureMode::Exhaustive, StructureMode::Sampled { count: 100, seed: 3 }] {
            let r = check_structure(&f, mode).unwrap();
            assert!(r.submodular && r.monotone && r.symmetric && r.nonnegative);
        }
    }

    #[test]
    fn sampling_finds_a_supermodular_violation() {
        let f = FnOracle::new(30, OracleFlags::NONE, |s: &SubsetMask| (s.len() * s.len()) as f64);
        let r = check_structure(&f, StructureMode::Sampled { count: 20, seed: 0 }).unwrap();
        assert!(!r.submodular);
        assert!(r.submodular_witness.unwrap().violates(&f, 1e-9));
    }

    #[test]
    fn exhaustive_mode_has_a_size_limit() {
        let f = FnOracle::new(20, OracleFlags::NONE, |_: &SubsetMask| 0.0);
        assert!(check_structure(&f, StructureMode::Exhaustive).is_err());
    }
}
