//! Load balancing on f6: the simple partition and the sampling procedure.

use submodlab::decision::DecisionOptions;
use submodlab::partition::{slb_decide, slb_simple, SlbInstance};
use submodlab::zoo::HardPairF5F6;

fn main() {
    let f6 = HardPairF5F6::with_seed(36, 6, 2, 2).unwrap().f6();
    let simple = slb_simple(&f6, 6).unwrap();
    println!("simple: makespan {}", simple.makespan);

    let inst = SlbInstance::new(f6, 6, 2.05, 0.9).unwrap();
    let out = slb_decide(&inst, &DecisionOptions::default(), 2).unwrap();
    if let Some(r) = out.solution() {
        println!("sampled ({:?}): makespan {}", r.method, r.makespan);
        for b in &r.blocks {
            println!("  {:?}", b.to_vec());
        }
    }
}
