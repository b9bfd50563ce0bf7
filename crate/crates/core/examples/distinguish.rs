//! How often do random queries tell f3 from f4? Fair-coin masks almost never
//! do; sets of the hidden size sometimes do.

use submodlab::verify::{distinguish_experiment, separation_probability, PairSpec, QueryStrategy};

fn main() {
    let spec = PairSpec::F3F4 { n: 400, alpha: 40, beta: 8 };
    for strategy in [QueryStrategy::RandomMasks, QueryStrategy::SizeTargeted { size: 40 }] {
        let r = distinguish_experiment(spec, strategy, 2000, 40, 1, None).unwrap();
        let p = separation_probability(&spec, strategy).unwrap().unwrap();
        println!("{strategy:?}: {}/40 trials separated, per-query probability {p:.3e}", r.trials_with_any_value_difference);
    }
}
