//! Sparsest cut on two 5-cliques joined by one edge.

use submodlab::cut::{ssc_approximate, ssc_decide, SscInstance};
use submodlab::decision::{BudgetPolicy, DecisionOptions};
use submodlab::zoo::GraphCut;

fn main() {
    let mut edges = vec![(4, 5, 1.0)];
    for base in [0, 5] {
        for u in base..base + 5 {
            for v in u + 1..base + 5 {
                edges.push((u, v, 1.0));
            }
        }
    }
    let g = GraphCut::new(10, &edges).unwrap();
    let inst = SscInstance::uniform(&g).unwrap();
    // failing decisions run to the cap, so keep it small for the search
    let opts = DecisionOptions::with_budget(BudgetPolicy::capped(300));

    // the planted cut has ratio 1/25
    let out = ssc_decide(&inst, 0.044, 0.9, &opts, 3).unwrap();
    match out.solution() {
        Some(t) => println!("decide: {:?} with ratio {:?} after {} iterations", t.to_vec(), out.objective, out.iterations),
        None => println!("decide: {:?}", out.status),
    }

    let approx = ssc_approximate(&inst, 0.9, 0.05, &opts, 3).unwrap();
    println!("approx: {:?} ratio {} window {:?}", approx.set.to_vec(), approx.ratio, approx.window);
}
