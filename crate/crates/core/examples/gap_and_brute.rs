//! Brute-force optima of hard pairs, and of one sparsest-cut instance directly.

use submodlab::cut::SscInstance;
use submodlab::verify::{brute_force_optimum, gap_report, BruteProblem, GapProblem, PairSpec};
use submodlab::zoo::GraphCut;

fn main() {
    for (spec, problem) in [
        (PairSpec::F1F2 { n: 8, beta: 3 }, GapProblem::Ssc),
        (PairSpec::F3F4 { n: 12, alpha: 6, beta: 2 }, GapProblem::Sml { target_weight: 6 }),
        (PairSpec::F5F6 { n: 12, m: 3, beta: 2 }, GapProblem::Slb { m: 3 }),
    ] {
        let r = gap_report(spec, problem, 0).unwrap();
        println!("{}: {} vs {}, ratio {:?}", spec.id(), r.first.value, r.second.value, r.ratio);
    }

    let path = GraphCut::new(5, &[(0, 1, 1.0), (1, 2, 3.0), (2, 3, 3.0), (3, 4, 1.0)]).unwrap();
    let best = brute_force_optimum(BruteProblem::Ssc(&SscInstance::uniform(&path).unwrap())).unwrap();
    println!("path cut: {} via {:?}", best.value, best.witness);
}
