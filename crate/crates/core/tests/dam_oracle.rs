mod common;

use std::cmp::Ordering;

use common::*;
use damcap::dam::{
    exact_field_sign, fast_field_sign, is_fixed_point, rect_poly, update_sign, DamConfig,
    FastDecision, NumericPath, StoredMemory, TieMode,
};
use damcap::generators::keyed_rng;
use damcap::{check_prefix_retrieval, Pattern, PatternSet, Source};
use num_bigint::BigInt;
use rand::Rng;

const PATHS: [NumericPath; 2] = [
    NumericPath::ExactInteger,
    NumericPath::FastFloatWithExactFallback,
];

fn memory(pats: &[Vec<i8>], n: u32, path: NumericPath) -> StoredMemory {
    let cfg = DamConfig::new(pats[0].len(), n).unwrap().with_path(path);
    StoredMemory::new(pats.iter().map(|p| to_pattern(p)).collect(), cfg).unwrap()
}

#[test]
fn rect_poly_784_pow_38_is_exact() {
    const FROZEN: &str = "96385206467398033883105850708457409199493559216115353610714482902113142761349148186312071352448894989391364096";
    let v = rect_poly(784, 38);
    assert_eq!(v.to_string(), FROZEN);
    assert_eq!(BigInt::from(v), naive_rect_poly(784, 38));
    // f64 can hold it only approximately; f32 cannot hold it at all
    assert!((784f32).powi(38).is_infinite());
    for x in -5..=40 {
        for n in 1..=12 {
            assert_eq!(BigInt::from(rect_poly(x, n)), naive_rect_poly(x, n));
        }
    }
}

#[test]
fn complement_pair_keeps_first_memory_stable() {
    // all first memories at N = 8; second memory is the complement
    for first in all_bipolar(8) {
        let comp: Vec<i8> = first.iter().map(|v| -v).collect();
        let mems = vec![first.clone(), comp];
        for n in 1..=6 {
            let naive: Vec<i8> = (0..8).map(|i| naive_update(&mems, &first, i, n)).collect();
            assert_eq!(naive, first);
            for path in PATHS {
                let m = memory(&mems, n, path);
                let st = to_pattern(&first);
                for (i, &v) in first.iter().enumerate() {
                    assert_eq!(update_sign(&m, &st, i).unwrap(), v);
                }
            }
        }
    }
}

#[test]
fn crosstalk_instance_flips_neuron() {
    let mems = vec![vec![1, 1, 1, 1], vec![1, 1, 1, -1], vec![1, 1, -1, 1]];
    let state = vec![1, 1, -1, 1];
    // field at n = 1 is +2 (frozen from a hand evaluation), so neuron 2 flips to +1
    assert_eq!(naive_field(&mems, &state, 2, 1), BigInt::from(2));
    for path in PATHS {
        let m = memory(&mems, 1, path);
        assert_eq!(update_sign(&m, &to_pattern(&state), 2).unwrap(), 1);
    }
    for n in 1..=6 {
        let expected = naive_update(&mems, &state, 2, n);
        for path in PATHS {
            assert_eq!(
                update_sign(&memory(&mems, n, path), &to_pattern(&state), 2).unwrap(),
                expected
            );
        }
    }
}

#[test]
fn complement_of_single_memory_at_even_degree() {
    // The complement has overlaps -N and -(N - 2) in both branches, so every
    // field is zero: stable under tie retention, unstable under strict ties.
    for stored in all_bipolar(8) {
        let comp: Vec<i8> = stored.iter().map(|v| -v).collect();
        for n in [2, 4, 6, 8] {
            let naive = naive_sweep_fixed_point(std::slice::from_ref(&stored), &comp, n);
            assert!(naive);
            for path in PATHS {
                let m = memory(std::slice::from_ref(&stored), n, path);
                assert_eq!(is_fixed_point(&m, &to_pattern(&comp)).unwrap(), naive);
                assert_eq!(
                    is_fixed_point(&m, &to_pattern(&stored)).unwrap(),
                    is_fixed_point(&m, &to_pattern(&comp)).unwrap()
                );
                let strict = StoredMemory::new(
                    vec![to_pattern(&stored)],
                    m.config().with_tie_mode(TieMode::Strict),
                )
                .unwrap();
                assert!(!is_fixed_point(&strict, &to_pattern(&comp)).unwrap());
            }
        }
    }
}

#[test]
fn sign_flip_symmetry_for_complement_closed_sets() {
    let mut rng = keyed_rng(1, 2, 3);
    for _ in 0..20 {
        let base: Vec<Vec<i8>> = (0..rng.random_range(1..=3))
            .map(|_| random_bipolar(&mut rng, 6))
            .collect();
        let mut mems = base.clone();
        mems.extend(
            base.iter()
                .map(|p| p.iter().map(|v| -v).collect::<Vec<i8>>()),
        );
        for n in [2, 3, 4] {
            for path in PATHS {
                let m = memory(&mems, n, path);
                for c in all_bipolar(6) {
                    let p = to_pattern(&c);
                    assert_eq!(
                        is_fixed_point(&m, &p).unwrap(),
                        is_fixed_point(&m, &p.complement()).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn single_memory_symmetry_does_not_extend_to_arbitrary_candidates() {
    // Rectification breaks sign-flip symmetry for non-stored candidates when
    // K = 1: a candidate near the memory flips, its complement sees zero field.
    let stored = vec![1, 1, 1, 1, 1, 1];
    let cand = vec![1, 1, 1, 1, 1, -1];
    let m = memory(std::slice::from_ref(&stored), 2, NumericPath::ExactInteger);
    let p = to_pattern(&cand);
    assert!(!is_fixed_point(&m, &p).unwrap());
    assert!(is_fixed_point(&m, &p.complement()).unwrap());
    assert!(!naive_sweep_fixed_point(
        std::slice::from_ref(&stored),
        &cand,
        2
    ));
    assert!(naive_sweep_fixed_point(
        std::slice::from_ref(&stored),
        &cand.iter().map(|v| -v).collect::<Vec<_>>(),
        2
    ));
}

#[test]
fn random_candidates_match_naive_reference() {
    let mut rng = keyed_rng(7, 7, 7);
    for trial in 0..1000 {
        let n_neurons = rng.random_range(2..=12);
        let k = rng.random_range(1..=5);
        let degree = rng.random_range(1..=8);
        let mems: Vec<Vec<i8>> = (0..k)
            .map(|_| random_bipolar(&mut rng, n_neurons))
            .collect();
        let cand = random_bipolar(&mut rng, n_neurons);
        let expected = naive_sweep_fixed_point(&mems, &cand, degree);
        for path in PATHS {
            let m = memory(&mems, degree, path);
            assert_eq!(
                is_fixed_point(&m, &to_pattern(&cand)).unwrap(),
                expected,
                "trial {trial}: {mems:?} {cand:?} n={degree}"
            );
        }
    }
}

#[test]
fn cached_powers_match_per_neuron_recomputation() {
    let mut rng = keyed_rng(11, 0, 0);
    for _ in 0..150 {
        let n_neurons = rng.random_range(8..=48);
        let k = rng.random_range(1..=8);
        let degree = rng.random_range(1..=20);
        // correlated memories so that some candidates are unstable
        let base = random_bipolar(&mut rng, n_neurons);
        let mems: Vec<Vec<i8>> = (0..k)
            .map(|_| {
                base.iter()
                    .map(|&v| if rng.random::<f64>() < 0.2 { -v } else { v })
                    .collect()
            })
            .collect();
        for c in &mems {
            let expected = naive_sweep_fixed_point(&mems, c, degree);
            for path in PATHS {
                assert_eq!(
                    is_fixed_point(&memory(&mems, degree, path), &to_pattern(c)).unwrap(),
                    expected
                );
            }
        }
    }
}

#[test]
fn update_sign_matches_naive_on_random_states() {
    let mut rng = keyed_rng(5, 5, 5);
    for _ in 0..2000 {
        let n_neurons = rng.random_range(2..=24);
        let k = rng.random_range(1..=6);
        let degree = rng.random_range(1..=10);
        let mems: Vec<Vec<i8>> = (0..k)
            .map(|_| random_bipolar(&mut rng, n_neurons))
            .collect();
        let state = random_bipolar(&mut rng, n_neurons);
        let i = rng.random_range(0..n_neurons);
        let expected = naive_update(&mems, &state, i, degree);
        let field = naive_field(&mems, &state, i, degree);
        for path in PATHS {
            let m = memory(&mems, degree, path);
            let st = to_pattern(&state);
            assert_eq!(update_sign(&m, &st, i).unwrap(), expected);
            assert_eq!(
                exact_field_sign(&m, &st, i).unwrap(),
                field.sign().cmp(&num_bigint::Sign::NoSign)
            );
        }
    }
}

#[test]
fn one_memory_stability_random_configs() {
    let mut rng = keyed_rng(13, 0, 0);
    for _ in 0..1000 {
        let n_neurons = rng.random_range(2..=200);
        let degree = rng.random_range(1..=40);
        let p = to_pattern(&random_bipolar(&mut rng, n_neurons));
        for path in PATHS {
            for tie in [TieMode::Retain, TieMode::Strict] {
                let cfg = DamConfig::new(n_neurons, degree)
                    .unwrap()
                    .with_path(path)
                    .with_tie_mode(tie);
                let m = StoredMemory::new(vec![p.clone()], cfg).unwrap();
                assert!(is_fixed_point(&m, &p).unwrap());
            }
        }
    }
}

#[test]
fn duplicated_pattern_prefix_n16() {
    let mut rng = keyed_rng(17, 0, 0);
    for _ in 0..20 {
        let v = random_bipolar(&mut rng, 16);
        let pats = vec![v.clone(), v.clone()];
        let set = PatternSet::new(vec![to_pattern(&v), to_pattern(&v)], Source::External).unwrap();
        for n in 1..=6 {
            assert!(naive_prefix_retrieval(&pats, 2, n));
            assert!(
                check_prefix_retrieval(&set, 2, &DamConfig::new(16, n).unwrap().exact()).unwrap()
            );
        }
    }
}

#[test]
fn fast_path_abstains_only_near_ties() {
    // exactly tied field at large N and degree: float sums equal, must defer
    let a = Pattern::plus_ones(100);
    let b = a.with_flipped(0);
    let cfg = DamConfig::new(100, 30).unwrap();
    let m = StoredMemory::new(vec![a.clone(), b], cfg).unwrap();
    // neuron 0 sees branch overlaps (100, 98) from a and (98, 100) from b
    assert_eq!(fast_field_sign(&m, &a, 0).unwrap(), FastDecision::Abstain);
    assert_eq!(exact_field_sign(&m, &a, 0).unwrap(), Ordering::Equal);
    assert_eq!(update_sign(&m, &a, 0).unwrap(), 1);
}
