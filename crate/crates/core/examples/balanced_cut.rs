//! Balanced cuts: the symmetric variant on f1 and the general one on a 4-cycle.

use submodlab::cut::{sbc_general, sbc_symmetric, SbcOptions};
use submodlab::zoo::{GraphCut, HardPairF1F2};

fn main() {
    let f1 = HardPairF1F2::with_seed(12, 4, 0).unwrap().f1();
    let r = sbc_symmetric(&f1, &[1.0; 12], 1.0 / 3.0, &SbcOptions::default(), 1).unwrap();
    println!("symmetric: {:?} f={} balance={}", r.set.to_vec(), r.f_value, r.balance_achieved);

    let cycle = GraphCut::new(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
    let r = sbc_general(&cycle, &[1.0; 4], 0.5, &SbcOptions::default(), 1).unwrap();
    println!("general: {:?} f={} balance={}", r.set.to_vec(), r.f_value, r.balance_achieved);
}
