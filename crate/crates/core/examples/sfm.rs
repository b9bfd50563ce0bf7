//! Minimizes a graph cut minus a modular function, once by enumeration and once
//! by the min-norm-point method.

use submodlab::oracle::{with_modular, Sign};
use submodlab::sfm::{minimize, SfmConfig};
use submodlab::zoo::GraphCut;

fn main() {
    let triangle = GraphCut::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
    let f = with_modular(triangle, vec![1.5, 0.0, 0.0], Sign::Minus).unwrap();
    for cfg in [SfmConfig::exhaustive(), SfmConfig::min_norm_point()] {
        let r = minimize(&f, &cfg).unwrap();
        println!("{:?}: min {} at {:?} ({} queries)", r.method, r.min_value, r.minimizer.to_vec(), r.queries_used);
    }
}
