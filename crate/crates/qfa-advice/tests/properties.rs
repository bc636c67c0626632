//! Property tests for the small algebraic invariants that every other module
//! leans on. These complement the seeded oracle suites: inputs here are drawn
//! by the property-testing framework rather than fixed fixtures.

use proptest::prelude::*;

use qfa_advice::advice::{classify, split_track_symbol, track_symbol};
use qfa_advice::linalg::random_unitary;
use qfa_advice::machines::{RunOutcome, Verdict};
use qfa_advice::transforms::{amplify_k, majority_failure_tail, sweeping_matrix};
use qfa_advice::zoo::enumerate_strings;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    /// Haar-random matrices are unitary to working precision at any seed.
    #[test]
    fn random_unitary_is_unitary(seed in any::<u64>(), dim in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(dim, &mut rng);
        prop_assert!(u.unitarity_defect() < 1e-10);
    }

    /// The halting-state swap is a self-inverse permutation.
    #[test]
    fn sweeping_matrix_is_involution(k0 in 0usize..5, k1 in 0usize..5, k2 in 0usize..5) {
        let s = sweeping_matrix(k0, k1, k2);
        prop_assert!(s.unitarity_defect() < 1e-12);
        let dim = k0 + k1 + k2 + k1 + k2;
        let mut sq = s.matmul(&s);
        for i in 0..dim {
            sq[(i, i)] -= num_complex::Complex64::new(1.0, 0.0);
        }
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| sq[(i, j)].norm())
            .fold(0.0, f64::max);
        prop_assert!(off < 1e-12, "S^2 differs from I by {off}");
    }

    /// The repetition count is odd, sufficient, and minimal.
    #[test]
    fn amplify_k_is_minimal_odd(
        // eps0 capped away from 1/2 so the search stays small.
        eps0 in 0.01f64..0.40,
        eps in 0.01f64..0.49,
    ) {
        let k = amplify_k(eps0, eps).unwrap();
        prop_assert_eq!(k % 2, 1);
        prop_assert!(majority_failure_tail(k, eps0) <= eps);
        if k > 1 {
            prop_assert!(majority_failure_tail(k - 2, eps0) > eps);
        }
    }

    /// Majority vote never helps a coin that is right less than half the time
    /// to look worse than a single flip — the tail is monotone in k.
    #[test]
    fn majority_tail_decreases(eps0 in 0.01f64..0.49, k in 1usize..8) {
        let k = 2 * k - 1;
        prop_assert!(majority_failure_tail(k + 2, eps0) <= majority_failure_tail(k, eps0) + 1e-15);
    }

    /// Track symbols round-trip through their string encoding.
    #[test]
    fn track_symbol_round_trip(a in "[a-z0-9#$]{1,4}", b in "[a-z0-9#$]{1,4}") {
        let joined = track_symbol(&a, &b);
        let (ua, ub) = split_track_symbol(&joined).unwrap();
        prop_assert_eq!((ua, ub), (a, b));
    }

    /// Lexicographic enumeration has the right cardinality, ordering, and
    /// uniform string length.
    #[test]
    fn enumerate_strings_is_sorted(n in 0usize..8) {
        let sigma = vec!["a".to_string(), "b".to_string()];
        let all = enumerate_strings(&sigma, n);
        prop_assert_eq!(all.len(), 1usize << n);
        prop_assert!(all.iter().all(|x| x.len() == n));
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    /// Classification honors the ε-threshold semantics on any outcome whose
    /// probabilities form a distribution.
    #[test]
    fn classify_thresholds(p_acc in 0.0f64..1.0, eps in 0.0f64..0.49) {
        let outcome = RunOutcome {
            p_acc,
            p_rej: 1.0 - p_acc,
            p_residual: 0.0,
            traces: None,
        };
        let v = classify(&outcome, eps).unwrap();
        match v {
            Verdict::Accept => prop_assert!(p_acc >= 1.0 - eps),
            Verdict::Reject => prop_assert!(1.0 - p_acc >= 1.0 - eps),
            Verdict::Neither => {
                prop_assert!(p_acc < 1.0 - eps && 1.0 - p_acc < 1.0 - eps)
            }
        }
    }
}
