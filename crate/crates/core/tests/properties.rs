use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use submodlab::approx::{approximate_everywhere, SampleBudget};
use submodlab::cut::{ssc_decide, SscInstance};
use submodlab::decision::{sqrt_n_over_ln_n, BudgetPolicy, DecisionOptions};
use submodlab::oracle::{complemented, evaluate, with_modular, FnOracle, OracleFlags, SetFunction, Sign, SubsetMask};
use submodlab::partition::{slb_simple, SmlInstance};
use submodlab::sfm::{minimize, SfmConfig};
use submodlab::verify::{
    brute_force_optimum, check_sampling_bound, check_structure, distinguish_experiment, BruteProblem, PairSpec,
    QueryStrategy, StructureMode,
};
use submodlab::zoo::{random_monotone_table, Coverage, GraphCut, HardPairF1F2, HardPairF3F4, HardPairF5F6};

fn graph(n: usize) -> impl Strategy<Value = GraphCut> {
    prop::collection::vec((0..n, 0..n, 0.1f64..3.0), 1..2 * n).prop_map(move |raw| {
        let edges: Vec<_> = raw.into_iter().filter(|(u, v, _)| u != v).collect();
        GraphCut::new(n, &edges).unwrap()
    })
}

fn coverage(n: usize) -> impl Strategy<Value = Coverage> {
    (
        prop::collection::vec(0.1f64..2.0, 6),
        prop::collection::vec(prop::collection::vec(0usize..6, 0..4), n),
    )
        .prop_map(|(w, covers)| Coverage::new(w, covers).unwrap())
}

fn permuted(f: &GraphCut, perm: &[usize]) -> GraphCut {
    let edges: Vec<_> = f.edges().iter().map(|&(u, v, w)| (perm[u], perm[v], w)).collect();
    GraphCut::new(perm.len(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn min_norm_point_matches_enumeration(g in graph(9), shift in prop::collection::vec(-2.0f64..2.0, 9)) {
        let f = with_modular(g, shift, Sign::Plus).unwrap();
        let exact = minimize(&f, &SfmConfig::exhaustive()).unwrap();
        let mnp = minimize(&f, &SfmConfig::min_norm_point()).unwrap();
        let scale = exact.min_value.abs().max(1.0);
        prop_assert!((exact.min_value - mnp.min_value).abs() <= 1e-6 * scale);
        prop_assert!((evaluate(&f, &mnp.minimizer).unwrap() - mnp.min_value).abs() <= 1e-9 * scale);
    }

    #[test]
    fn complement_and_shift_keep_submodularity(c in coverage(8), shift in prop::collection::vec(-1.0f64..1.0, 8)) {
        let shifted = with_modular(complemented(&c), shift, Sign::Minus).unwrap();
        for report in [
            check_structure(&c, StructureMode::Exhaustive).unwrap(),
            check_structure(&complemented(&c), StructureMode::Exhaustive).unwrap(),
            check_structure(&shifted, StructureMode::Exhaustive).unwrap(),
        ] {
            prop_assert!(report.submodular, "{:?}", report.submodular_witness);
        }
    }

    #[test]
    fn witnesses_reverify(table in prop::collection::vec(-3.0f64..3.0, 64)) {
        let f = FnOracle::new(6, OracleFlags::NONE, move |s: &SubsetMask| table[s.as_word().unwrap() as usize]);
        let r = check_structure(&f, StructureMode::Exhaustive).unwrap();
        if let Some(w) = &r.submodular_witness {
            prop_assert!(w.violates(&f, 1e-9));
        }
        if let Some((s, v)) = &r.monotone_witness {
            prop_assert!(f.value(&s.with(*v)) < f.value(s));
        }
        if let Some(s) = &r.symmetric_witness {
            prop_assert!(f.value(s) != f.value(&s.complement()));
        }
        if let Some(s) = &r.nonnegative_witness {
            prop_assert!(f.value(s) < 0.0);
        }
    }

    #[test]
    fn brute_force_is_invariant_under_relabeling(g in graph(8), perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let h = permuted(&g, &perm);
        let ssc = |f: &GraphCut| brute_force_optimum(BruteProblem::Ssc(&SscInstance::uniform(f).unwrap())).unwrap().value;
        prop_assert!((ssc(&g) - ssc(&h)).abs() <= 1e-12);
        let sml = |f: &GraphCut| {
            brute_force_optimum(BruteProblem::Sml(&SmlInstance::cardinality(f, 3, 1.0, 0.9).unwrap())).unwrap().value
        };
        prop_assert!((sml(&g) - sml(&h)).abs() <= 1e-12);
        let slb = |f: &GraphCut| brute_force_optimum(BruteProblem::Slb { oracle: f, m: 3 }).unwrap().value;
        prop_assert!((slb(&g) - slb(&h)).abs() <= 1e-12);
    }

    #[test]
    fn sampling_bound_holds(m in 1u64..=200, q in 0.01f64..0.99, frac in 0.0f64..0.999) {
        let eps = ((1.0 - q) / q * frac * 1000.0).floor() / 1000.0;
        let r = check_sampling_bound(m, q, eps).unwrap();
        prop_assert!(r.exact_arithmetic);
        prop_assert!(r.holds, "{r:?}");
    }

    #[test]
    fn empty_queries_never_separate(seed in any::<u64>()) {
        for spec in [
            PairSpec::F1F2 { n: 16, beta: 5 },
            PairSpec::F3F4 { n: 30, alpha: 10, beta: 4 },
            PairSpec::F5F6 { n: 24, m: 4, beta: 2 },
        ] {
            let r = distinguish_experiment(spec, QueryStrategy::EmptyOnly, 5, 5, seed, Some(1)).unwrap();
            prop_assert_eq!(r.trials_with_any_value_difference, 0);
        }
    }

    #[test]
    fn approximation_is_a_sandwich(seed in any::<u64>(), n in 4usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_monotone_table(n, &mut rng);
        let (g, _) = approximate_everywhere(&f, 0.9, SampleBudget::Fixed { per_size: 40 }, seed).unwrap();
        let factor = 2.0 * (n as f64).sqrt();
        for w in 0..(1u64 << n) {
            let s = SubsetMask::from_word(n, w).unwrap();
            let (lo, hi) = (g.value(&s), f.value(&s));
            prop_assert!(lo <= hi + 1e-9 && hi <= factor * lo + 1e-9, "S={:?} approx={} f={}", s, lo, hi);
        }
    }

    #[test]
    fn simple_partition_is_within_its_factor(g in coverage(8), m in 2usize..=3) {
        let r = slb_simple(&g, m).unwrap();
        let opt = brute_force_optimum(BruteProblem::Slb { oracle: &g, m }).unwrap().value;
        let factor = m.min(8usize.div_ceil(m)) as f64;
        prop_assert!(r.makespan <= factor * opt + 1e-9);
        let mut all = SubsetMask::empty(8);
        for b in &r.blocks {
            prop_assert!(all.is_disjoint(b));
            all = all.union(b);
        }
        prop_assert!(all.is_full());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sparsest_cut_solutions_carry_their_certificate(g in graph(8), scale in 0.2f64..3.0, seed in any::<u64>()) {
        let inst = SscInstance::uniform(&g).unwrap();
        let opt = brute_force_optimum(BruteProblem::Ssc(&inst)).unwrap().value;
        let b = scale * opt.max(1e-3);
        let out = ssc_decide(&inst, b, 0.9, &DecisionOptions::with_budget(BudgetPolicy::capped(300)), seed).unwrap();
        if let Some(t) = out.solution() {
            let ratio = g.value(t) / inst.separated(t);
            prop_assert!(ratio < 4.0 * sqrt_n_over_ln_n(8) * b);
        }
    }
}

#[test]
fn zoo_functions_pass_their_structural_claims() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..3 {
        let p12 = HardPairF1F2::with_seed(12, 4, seed).unwrap();
        for r in [check_structure(&p12.f1(), StructureMode::Exhaustive), check_structure(&p12.f2(), StructureMode::Exhaustive)] {
            let r = r.unwrap();
            assert!(r.submodular && r.symmetric && r.nonnegative);
        }
        let p34 = HardPairF3F4::with_seed(12, 6, 2, seed).unwrap();
        let p56 = HardPairF5F6::with_seed(12, 3, 2, seed).unwrap();
        let t = random_monotone_table(12, &mut rng);
        for r in [
            check_structure(&p34.f3(), StructureMode::Exhaustive),
            check_structure(&p34.f4(), StructureMode::Exhaustive),
            check_structure(&p56.f5(), StructureMode::Exhaustive),
            check_structure(&p56.f6(), StructureMode::Exhaustive),
            check_structure(&t, StructureMode::Exhaustive),
        ] {
            let r = r.unwrap();
            assert!(r.submodular && r.monotone && r.nonnegative);
        }
    }
}
