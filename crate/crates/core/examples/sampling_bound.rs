//! Binomial upper tail against its closed-form lower bound.

use submodlab::verify::check_sampling_bound;

fn main() {
    for (m, q, eps) in [(100, 0.5, 0.2), (200, 0.1, 1.5), (1000, 0.3, 0.4)] {
        let r = check_sampling_bound(m, q, eps).unwrap();
        println!(
            "m={m} q={q} eps={eps}: tail {:.6e} >= bound {:.6e}? {} (exact arithmetic: {})",
            r.exact_probability, r.closed_form_bound, r.holds, r.exact_arithmetic
        );
    }
}
