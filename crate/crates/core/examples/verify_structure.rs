//! Structural checks: a coverage function, then a table that breaks submodularity.

use submodlab::oracle::{FnOracle, OracleFlags, SubsetMask};
use submodlab::verify::{check_structure, StructureMode};
use submodlab::zoo::Coverage;

fn main() {
    let c = Coverage::new(vec![1.0, 2.0, 1.0], vec![vec![0], vec![0, 1], vec![2], vec![1, 2]]).unwrap();
    let r = check_structure(&c, StructureMode::Exhaustive).unwrap();
    println!("coverage: submodular={} monotone={} symmetric={}", r.submodular, r.monotone, r.symmetric);

    // |S|^2 is supermodular
    let sq = FnOracle::new(5, OracleFlags::NONE, |s: &SubsetMask| (s.len() * s.len()) as f64);
    let r = check_structure(&sq, StructureMode::Sampled { count: 200, seed: 1 }).unwrap();
    println!("|S|^2: submodular={} witness={:?}", r.submodular, r.submodular_witness);
}
