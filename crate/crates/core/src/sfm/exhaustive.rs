use super::{SfmConfig, SfmError, SfmMethod, SfmResult};
use crate::oracle::{EvalContext, SetFunction, SubsetMask};

pub(super) fn minimize<F: SetFunction + ?Sized>(f: &F, cfg: &SfmConfig) -> Result<SfmResult, SfmError> {
    let n = f.ground_size();
    if n > 30 {
        return Err(SfmError::TooLarge { n });
    }
    let mut ctx = EvalContext::new();
    let mut best_word = 0u64;
    let mut best = ctx.evaluate(f, &SubsetMask::empty(n))?;
    for word in 1..1u64 << n {
        let s = SubsetMask::from_word(n, word)?;
        let v = ctx.evaluate(f, &s)?;
        if v < best - cfg.tie_tolerance {
            best = v;
            best_word = word;
        }
    }
    Ok(SfmResult {
        minimizer: SubsetMask::from_word(n, best_word)?,
        min_value: best,
        method: SfmMethod::Exhaustive,
        iterations: 1 << n,
        queries_used: ctx.queries(),
    })
}
