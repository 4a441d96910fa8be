//! Property tests for invariants that hold for every input.

use num_rational::Rational64;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use monolab::func::{BitTableFunction, FunctionFile, LtfSpec};
use monolab::hypergrid::{phi_odd, GridTable};
use monolab::oracle::{exact_distance, random_monotone};
use monolab::testers::{EdgeTester, WeightedPathTester};

fn table(n: usize, seed: u64) -> BitTableFunction {
    BitTableFunction::random(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// `x ↦ ¬f(¬x)`, which is monotone exactly when `f` is.
fn dual(f: &BitTableFunction) -> BitTableFunction {
    let mask = f.size() - 1;
    BitTableFunction::from_fn(f.n(), |x| !f.value(!x & mask)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_at_most_half(n in 1usize..=7, seed: u64) {
        let d = exact_distance(&table(n, seed)).unwrap().distance;
        prop_assert!(d >= Rational64::zero() && d <= Rational64::new(1, 2));
    }

    #[test]
    fn distance_zero_iff_monotone(n in 1usize..=6, seed: u64, close in any::<bool>()) {
        let f = if close { table(n, seed).upward_closure() } else { table(n, seed) };
        prop_assert_eq!(exact_distance(&f).unwrap().distance.is_zero(), f.is_monotone());
    }

    #[test]
    fn distance_invariant_under_duality(n in 1usize..=7, seed: u64) {
        let f = table(n, seed);
        prop_assert_eq!(exact_distance(&f).unwrap().distance, exact_distance(&dual(&f)).unwrap().distance);
    }

    #[test]
    fn edges_bound_the_matching(n in 1usize..=8, seed: u64) {
        let f = table(n, seed);
        let m = exact_distance(&f).unwrap().matching_size;
        // Each point lies on n edges, so the violated edges contain a matching of size at least |E|/(2n - 1).
        prop_assert!(m * (2 * n as u64 - 1) >= f.violated_edge_count());
    }

    #[test]
    fn hex_round_trips(n in 1usize..=9, seed: u64) {
        let f = table(n, seed);
        prop_assert_eq!(BitTableFunction::from_hex(n, &f.to_hex()).unwrap(), f);
    }

    #[test]
    fn ltf_files_round_trip(weights in prop::collection::vec(-20i64..=20, 1..=8), theta in -10i64..=10) {
        let file = FunctionFile::Ltf(LtfSpec::from_integers(&weights, theta).unwrap());
        prop_assert_eq!(FunctionFile::from_json(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn nonnegative_ltfs_are_monotone(weights in prop::collection::vec(0i64..=9, 1..=8), theta in -10i64..=30) {
        prop_assert!(LtfSpec::from_integers(&weights, theta).unwrap().to_table().unwrap().is_monotone());
    }

    #[test]
    fn odd_lift_preserves_monotonicity(n in 1usize..=2, seed: u64) {
        let f = table(n, seed);
        let g = GridTable::from_function(&phi_odd(&f, 3).unwrap()).unwrap();
        prop_assert_eq!(g.is_monotone(), f.is_monotone());
    }

    #[test]
    fn testers_never_reject_monotone(n in 2usize..=10, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_monotone(n, &mut rng).unwrap();
        let edge = EdgeTester::new(n).unwrap();
        let weighted = WeightedPathTester::new(n, 0.5).unwrap();
        for _ in 0..200 {
            prop_assert!(!edge.trial_with(&f, &mut rng).found());
            prop_assert!(!weighted.trial_with(&f, &mut rng).found());
        }
    }
}
