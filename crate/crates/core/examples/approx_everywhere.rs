//! Learns a monotone two-partition function from random queries and reports
//! the worst ratio over all sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use submodlab::approx::{approximate_everywhere, SampleBudget};
use submodlab::oracle::{SetFunction, SubsetMask};
use submodlab::zoo::random_monotone_table;

fn main() {
    let n = 12;
    let f = random_monotone_table(n, &mut ChaCha8Rng::seed_from_u64(4));
    let (g, log) = approximate_everywhere(&f, 0.9, SampleBudget::default(), 4).unwrap();
    let mut worst = 1.0f64;
    for w in 0..1u64 << n {
        let s = SubsetMask::from_word(n, w).unwrap();
        if g.value(&s) > 0.0 {
            worst = worst.max(f.value(&s) / g.value(&s));
        }
    }
    println!("exact table: {}, queries: {}, worst f/g: {worst:.4} (limit {:.4})", g.is_exact(), log.queries, 2.0 * (n as f64).sqrt());
}
