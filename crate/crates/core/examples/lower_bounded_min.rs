//! Minimization under a cardinality lower bound on f4, where the hidden set is
//! cheap but looks like everything else.

use submodlab::decision::DecisionOptions;
use submodlab::oracle::SetFunction;
use submodlab::partition::{sml_decide, SmlInstance};
use submodlab::zoo::HardPairF3F4;

fn main() {
    let pair = HardPairF3F4::with_seed(20, 8, 3, 5).unwrap();
    let inst = SmlInstance::cardinality(pair.f4(), 8, 3.05, 0.9).unwrap();
    let out = sml_decide(&inst, &DecisionOptions::default(), 5).unwrap();
    match out.into_solution() {
        Some(r) => println!("U = {:?}, f(U) = {}, |U| = {}", r.set.to_vec(), inst.oracle().value(&r.set), r.weight),
        None => println!("no set found"),
    }
    println!("hidden set: {:?} with f4 = {}", pair.hidden().to_vec(), pair.f4().value(pair.hidden()));
}
