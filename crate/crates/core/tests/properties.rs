mod common;

use common::*;
use damcap::capacity::{binary_search_last_true, linear_scan};
use damcap::experiment::bucket::bucketize;
use damcap::experiment::report::{read_sweep_csv, write_sweep_csv};
use damcap::experiment::{run_sweep_inputs, SweepConfig, SweepInput, SweepRecord};
use damcap::generators::{
    build_dataset, expected_rademacher_hd, gen_skewed_rademacher, greedy_select_with, keyed_rng,
    sample_rademacher, DatasetPlan, GreedyConfig, RademacherSpec,
};
use damcap::ingest::{binarize, read_idx_images, IDX_IMAGES_MAGIC};
use damcap::{
    find_kmax, find_kmax_linear, hamming_distance, mean_pairwise_hd, overlap, CapacityPolicy,
    DamConfig, Error, Pattern, PatternSet, Source,
};
use proptest::prelude::*;
use rand::Rng;

fn bipolar(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n)
}

fn triple() -> impl Strategy<Value = (Vec<i8>, Vec<i8>, Vec<i8>)> {
    (1usize..300).prop_flat_map(|n| (bipolar(n), bipolar(n), bipolar(n)))
}

proptest! {
    #[test]
    fn hd_symmetric_and_triangle((a, b, c) in triple()) {
        let (pa, pb, pc) = (to_pattern(&a), to_pattern(&b), to_pattern(&c));
        let ab = hamming_distance(&pa, &pb).unwrap();
        prop_assert_eq!(ab, hamming_distance(&pb, &pa).unwrap());
        prop_assert!(
            hamming_distance(&pa, &pc).unwrap()
                <= ab + hamming_distance(&pb, &pc).unwrap()
        );
        prop_assert_eq!(ab, naive_hd(&a, &b));
        prop_assert_eq!(overlap(&pa, &pb).unwrap(), naive_overlap(&a, &b));
    }

    #[test]
    fn pattern_round_trips_through_bipolar(v in (1usize..200).prop_flat_map(bipolar)) {
        let p = to_pattern(&v);
        prop_assert_eq!(p.to_bipolar(), v.clone());
        prop_assert_eq!(Pattern::from_words(p.words().to_vec(), v.len()).unwrap(), p.clone());
        prop_assert_eq!(hamming_distance(&p, &p.complement()).unwrap(), v.len());
    }

    #[test]
    fn binarize_idempotent(img in prop::collection::vec(any::<u8>(), 1..900), t in 1u8..=255) {
        let p = binarize(&img, t, img.len()).unwrap();
        let rendered: Vec<u8> = p.to_bipolar().iter().map(|&v| if v > 0 { 255 } else { 0 }).collect();
        prop_assert_eq!(binarize(&rendered, t, img.len()).unwrap(), p);
    }

    #[test]
    fn idx_count_times_shape_matches_payload(count in 0u32..6, rows in 1u32..8, cols in 1u32..8, extra in 0usize..3) {
        let payload_len = (count * rows * cols) as usize;
        let mut raw = Vec::new();
        raw.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
        for d in [count, rows, cols] {
            raw.extend_from_slice(&d.to_be_bytes());
        }
        raw.extend((0..payload_len + extra).map(|i| (i * 37 % 256) as u8));
        match read_idx_images(&raw) {
            Ok(pool) => {
                prop_assert_eq!(extra, 0);
                prop_assert_eq!(pool.len() * pool.rows * pool.cols, raw.len() - 16);
            }
            Err(_) => prop_assert!(extra > 0),
        }
    }

    #[test]
    fn rademacher_deterministic(p in 0.51f64..=1.0, seed in any::<u64>(), n in 1usize..300) {
        let spec = RademacherSpec { p, n_patterns: 5, n_neurons: n, seed };
        prop_assert_eq!(gen_skewed_rademacher(&spec).unwrap(), gen_skewed_rademacher(&spec).unwrap());
    }

    #[test]
    fn binary_search_matches_step_predicate(max_k in 1usize..200, cut in 0usize..220) {
        let mut calls = 0;
        let out = binary_search_last_true::<()>(max_k, |k| { calls += 1; Ok(k <= cut) }).unwrap();
        prop_assert_eq!(out.k_max, cut.min(max_k));
        prop_assert_eq!(out.n_checks, calls);
        let bound = (max_k as f64).log2().ceil() as usize + 1;
        prop_assert!(out.n_checks <= bound, "{} > {}", out.n_checks, bound);
    }

    #[test]
    fn csv_round_trip(records in prop::collection::vec(arb_record(), 0..20)) {
        let mut buf = Vec::new();
        write_sweep_csv(&records, &mut buf).unwrap();
        prop_assert!(!buf.contains(&b'\r'));
        let back = read_sweep_csv(&buf[..]).unwrap();
        prop_assert_eq!(&back, &records);
        let mut again = Vec::new();
        write_sweep_csv(&back, &mut again).unwrap();
        prop_assert_eq!(again, buf);
    }

    #[test]
    fn bucket_membership_is_band_predicate(
        records in prop::collection::vec(arb_record(), 0..30),
        centers in prop::collection::vec(0.0f64..400.0, 0..6),
        leeway in 0.5f64..50.0,
    ) {
        let buckets = bucketize(&records, &centers, leeway);
        prop_assert_eq!(buckets.len(), if records.is_empty() { 0 } else { centers.len() });
        for b in &buckets {
            let expected: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.is_plottable())
                .filter(|r| r.realized_mean_hd.is_some_and(|hd| (hd - b.center).abs() <= leeway))
                .collect();
            prop_assert_eq!(b.members.iter().collect::<Vec<_>>(), expected);
        }
    }
}

fn arb_record() -> impl Strategy<Value = SweepRecord> {
    (
        "[a-z0-9,\" -]{0,12}",
        prop::sample::select(vec![
            Source::Rademacher,
            Source::ImagePool,
            Source::External,
        ]),
        prop::option::of(0.0f64..1.0),
        prop::option::of(0.0f64..400.0),
        prop::option::of(0.0f64..400.0),
        1u32..40,
        0usize..60,
        any::<(bool, bool, bool)>(),
        0usize..10,
        0.0f64..1e6,
        any::<u64>(),
    )
        .prop_map(
            |(id, source, skew_p, target_hd, hd, degree, k_max, flags, n_checks, wall, seed)| {
                SweepRecord {
                    dataset_id: id,
                    source,
                    skew_p,
                    target_hd,
                    realized_mean_hd: hd,
                    degree,
                    k_max,
                    saturated: flags.0,
                    excluded: flags.1,
                    n_checks,
                    wall_time_ms: wall,
                    seed,
                    extrapolated: flags.2,
                }
            },
        )
}

#[test]
fn hd_overlap_identity_on_1e5_pairs() {
    let mut rng = keyed_rng(99, 1, 0);
    for _ in 0..100_000 {
        let n = rng.random_range(1..=900);
        let a = random_bipolar(&mut rng, n);
        let b = random_bipolar(&mut rng, n);
        let (pa, pb) = (to_pattern(&a), to_pattern(&b));
        let hd = hamming_distance(&pa, &pb).unwrap();
        assert_eq!(hd, naive_hd(&a, &b));
        assert_eq!(overlap(&pa, &pb).unwrap(), n as i64 - 2 * hd as i64);
    }
}

#[test]
fn rademacher_mean_within_three_standard_errors() {
    for p in [0.6, 0.75, 0.9] {
        let means: Vec<f64> = (0..120)
            .map(|seed| mean_pairwise_hd(&sample_rademacher(p, 50, 784, seed).unwrap()).unwrap())
            .collect();
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        let se = (var / means.len() as f64).sqrt();
        let expected = expected_rademacher_hd(p, 784);
        assert!(
            (m - expected).abs() <= 3.0 * se,
            "p={p}: {m} vs {expected} (se {se})"
        );
    }
}

#[test]
fn artificial_coverage_is_monotone() {
    for seed in [0, 1, 2] {
        let subsets = build_dataset(&DatasetPlan::artificial(seed), None).unwrap();
        let inversions = subsets
            .windows(2)
            .filter(|w| w[1].realized_mean_hd >= w[0].realized_mean_hd)
            .count();
        assert!(inversions <= 2, "seed {seed}: {inversions} inversions");
    }
}

#[test]
fn greedy_lands_in_band_or_reports_infeasible() {
    let mut pool = Vec::new();
    for (i, p) in [0.55, 0.8, 0.95].into_iter().enumerate() {
        pool.extend(
            sample_rademacher(p, 200, 128, i as u64)
                .unwrap()
                .into_patterns(),
        );
    }
    let pool = PatternSet::new(pool, Source::External).unwrap();
    let config = GreedyConfig {
        max_trials: Some(4000),
        ..GreedyConfig::default()
    };
    let mut reached = 0;
    for (i, target) in [2.0, 10.0, 20.0, 35.0, 50.0, 60.0, 64.0, 120.0]
        .into_iter()
        .enumerate()
    {
        match greedy_select_with(&pool, target, 10, i as u64, &config) {
            Ok(sel) => {
                reached += 1;
                assert!((sel.realized_mean_hd - target).abs() <= config.band);
                assert_eq!(sel.realized_mean_hd, mean_pairwise_hd(&sel.set).unwrap());
                assert_eq!(sel.set.len(), 10);
            }
            Err(Error::InfeasibleTarget { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(reached >= 4);
}

#[test]
fn greedy_is_deterministic() {
    let pool = sample_rademacher(0.7, 300, 64, 5).unwrap();
    let a = greedy_select_with(&pool, 25.0, 8, 3, &GreedyConfig::default()).unwrap();
    let b = greedy_select_with(&pool, 25.0, 8, 3, &GreedyConfig::default()).unwrap();
    assert_eq!(a.set, b.set);
    assert_eq!(a.draws, b.draws);
}

fn random_instance(seed: u64) -> PatternSet {
    // a skew per instance puts the capacity somewhere inside [1, 20]
    let mut rng = keyed_rng(seed, 77, 0);
    let p = rng.random_range(0.5..0.95);
    sample_rademacher(p, 20, 64, seed).unwrap()
}

#[test]
fn capacity_oracle_agreement_and_invariants() {
    let policy = CapacityPolicy {
        max_k: 20,
        exclude_above: Some(19),
        ..CapacityPolicy::default()
    };
    let mut non_monotone = 0;
    for seed in 0..210u64 {
        let degree = [2, 4, 8][seed as usize % 3];
        let set = random_instance(seed);
        let cfg = DamConfig::new(64, degree).unwrap();
        let fast = find_kmax(&set, &cfg, &policy).unwrap();
        let lin = find_kmax_linear(&set, &cfg.exact(), &policy).unwrap();
        assert!(fast.k_max >= 1);
        assert!(fast.n_checks <= 20f64.log2().ceil() as usize + 1);
        if lin.monotone {
            assert_eq!(fast.k_max, lin.result.k_max, "seed {seed}");
        } else {
            non_monotone += 1;
        }
        match fast.realized_mean_hd {
            Some(hd) => assert_eq!(
                hd,
                damcap::patterns::mean_pairwise_hd_of(&set.patterns()[..fast.k_max]).unwrap()
            ),
            None => assert!(fast.k_max < 2),
        }
        assert_eq!(fast.saturated, fast.k_max == 20);
        assert_eq!(fast.excluded, fast.k_max > 19);
        let again = find_kmax(&set, &cfg, &policy).unwrap();
        assert_eq!(
            (
                again.k_max,
                again.realized_mean_hd,
                again.saturated,
                again.excluded,
                again.n_checks
            ),
            (
                fast.k_max,
                fast.realized_mean_hd,
                fast.saturated,
                fast.excluded,
                fast.n_checks
            )
        );
    }
    assert!(non_monotone < 210);
}

#[test]
fn linear_scan_flags_non_monotone_stub() {
    let scan = linear_scan::<()>(3, |k| Ok(k != 2)).unwrap();
    assert_eq!(
        (scan.first_failure_k_max, scan.global_k_max, scan.monotone),
        (1, 3, false)
    );
}

#[test]
fn sweep_rerun_is_byte_stable_except_timing() {
    let inputs: Vec<SweepInput> = [0.55, 0.7, 0.85, 0.95]
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let set = sample_rademacher(p, 20, 96, i as u64)
                .unwrap()
                .with_skew_p(p);
            SweepInput::new(format!("s{i}"), "rad", set)
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let mut config = SweepConfig::new(vec![], dir.path().to_path_buf());
    config.degree_grid = vec![2, 3, 6];
    config.policy.max_k = 20;
    config.policy.exclude_above = Some(19);
    let render = |threads: usize| {
        let mut c = config.clone();
        c.parallelism = threads;
        let mut records = run_sweep_inputs(&inputs, &c).unwrap().records;
        for r in &mut records {
            r.wall_time_ms = 0.0;
        }
        let mut buf = Vec::new();
        write_sweep_csv(&records, &mut buf).unwrap();
        (records, buf)
    };
    let (records, a) = render(1);
    let (_, b) = render(4);
    assert_eq!(a, b);
    assert!(records.len() <= inputs.len() * 3);
    // every (dataset, degree) appears exactly once
    let mut keys: Vec<_> = records
        .iter()
        .map(|r| (r.dataset_id.clone(), r.degree))
        .collect();
    keys.dedup();
    assert_eq!(keys.len(), records.len());
    assert_eq!(records.len(), inputs.len() * 3);
}
