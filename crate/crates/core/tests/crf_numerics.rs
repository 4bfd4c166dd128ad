//! CRF numerics against brute-force enumeration and finite differences.

mod common;

use common::crf::*;
use proc2bpmn::corpus::IobTag;
use proc2bpmn::ner::crf::{backward, emission_scores, forward, objective, path_score, viterbi, Layout};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn gradient_matches_central_differences() {
    for seed in 0..20 {
        let gap = gradient_gap(seed, 0.05);
        assert!(gap < 1e-4, "seed {seed}: {gap}");
    }
}

#[test]
fn objective_matches_enumeration() {
    let lambda = 0.05;
    for seed in 100..130 {
        let (layout, w, data) = random_problem(seed);
        let (value, _) = objective(&layout, &w, &data, lambda);
        let oracle = brute_objective(&layout, &w, &data, lambda);
        assert!((value - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "{value} vs {oracle}");
    }
}

#[test]
fn viterbi_matches_exhaustive_search_over_all_tags() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for len in 1..=4 {
        for _ in 0..6 {
            assert!(viterbi_is_exact(&mut rng, IobTag::COUNT, len));
        }
    }
}

#[test]
fn forward_backward_partition_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for len in 1..=3 {
        for _ in 0..5 {
            let layout = Layout::new(5, IobTag::COUNT);
            let w = random_weights(&mut rng, &layout);
            let pos = random_positions(&mut rng, len, 5);
            let em = emission_scores(&layout, &w, &pos);
            let (_, zf) = forward(&layout, &w, &em);
            let (_, zb) = backward(&layout, &w, &em);
            assert!((zf - zb).abs() < 1e-8, "{zf} vs {zb}");
            let oracle = brute_log_z(&layout, &w, &pos);
            assert!((zf - oracle).abs() < 1e-9 * oracle.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_and_backward_agree_on_long_sequences(seed in any::<u64>(), len in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(partition_gap(&mut rng, IobTag::COUNT, len) < 1e-8);
    }

    #[test]
    fn viterbi_dominates_random_paths(seed in any::<u64>(), len in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = Layout::new(5, IobTag::COUNT);
        let w = random_weights(&mut rng, &layout);
        let pos = random_positions(&mut rng, len, 5);
        let em = emission_scores(&layout, &w, &pos);
        let (path, score) = viterbi(&layout, &w, &em);
        prop_assert!((path_score(&layout, &w, &em, &path) - score).abs() < 1e-9);
        for _ in 0..200 {
            let p: Vec<usize> = (0..len).map(|_| rng.gen_range(0..layout.num_labels)).collect();
            prop_assert!(path_score(&layout, &w, &em, &p) <= score + 1e-12);
        }
    }

    #[test]
    fn path_score_matches_definition(seed in any::<u64>(), len in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = Layout::new(4, 5);
        let w = random_weights(&mut rng, &layout);
        let pos = random_positions(&mut rng, len, 4);
        let em = emission_scores(&layout, &w, &pos);
        let p: Vec<usize> = (0..len).map(|_| rng.gen_range(0..5)).collect();
        prop_assert!((path_score(&layout, &w, &em, &p) - naive_score(&layout, &w, &pos, &p)).abs() < 1e-10);
    }
}
