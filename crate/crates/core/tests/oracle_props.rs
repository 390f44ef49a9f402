mod common;

use common::{config, piece};
use num_traits::One;
use proptest::prelude::*;
use rotset_core::exec::Parallelism;
use rotset_core::heteroclinic::Chain;
use rotset_core::markov::{piece_rotation_set, word_rotation_vector};
use rotset_core::oracle::{combine, oracle_piece_set, sample_chain_with, Lcg64, MAX_WEIGHT_DENOMINATOR};
use rotset_core::rational::Rational;

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn oracle_grows_with_max_len(p in piece(3, 4)) {
        let n = p.graph.nodes.len();
        let mut prev = oracle_piece_set(&p, n).unwrap();
        for len in n + 1..=2 * n {
            let next = oracle_piece_set(&p, len).unwrap();
            prop_assert!(next.contains_polytope(&prev).unwrap());
            prev = next;
        }
    }

    #[test]
    fn samples_are_exact_members(a in piece(3, 4), b in piece(3, 4), seed in any::<u64>()) {
        let mut b = b;
        b.id = "Q".into();
        let pieces = vec![a.clone(), b.clone()];
        let hull = rotset_core::geom::RationalPolytope::hull_of_union([
            &piece_rotation_set(&a).unwrap(),
            &piece_rotation_set(&b).unwrap(),
        ])
        .unwrap();
        let chain = Chain::new(["P", "Q"]);
        let samples = sample_chain_with(&chain, &pieces, 20, seed, Parallelism::Sequential).unwrap();
        for s in &samples {
            prop_assert!(hull.contains(&s.average).unwrap());
            let total: Rational = s.weights.iter().sum();
            prop_assert!(total.is_one());
            prop_assert!(s.weights.iter().all(|w| *w.denom() <= MAX_WEIGHT_DENOMINATOR.into()));
        }
        prop_assert_eq!(
            sample_chain_with(&chain, &pieces, 20, seed, Parallelism::Parallel).unwrap(),
            samples
        );
    }

    #[test]
    fn single_piece_sample_is_its_word_mean(p in piece(3, 5), seed in any::<u64>()) {
        let chain = Chain::new(["P"]);
        for s in sample_chain_with(&chain, std::slice::from_ref(&p), 10, seed, Parallelism::Sequential).unwrap() {
            prop_assert_eq!(s.words.len(), 1);
            let mean = word_rotation_vector(&p, &s.words[0]).unwrap();
            prop_assert_eq!(&combine(&s.weights, std::slice::from_ref(&mean)).unwrap(), &s.average);
            prop_assert_eq!(s.average, mean);
        }
    }

    #[test]
    fn below_stays_in_range(seed in any::<u64>(), n in 1u64..1000) {
        let mut rng = Lcg64::new(seed);
        for _ in 0..64 {
            prop_assert!(rng.below(n) < n);
        }
    }
}
