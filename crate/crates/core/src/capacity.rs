//! Zero-error memory capacity `K_max` by binary search over prefix sizes.
//!
//! `K_max` is the largest `K` such that the DAM storing the first `K` patterns
//! retrieves each of them. The binary search assumes retrieval success is
//! non-increasing in `K`; [`find_kmax_linear`] scans every prefix and reports
//! whether that assumption held.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dam::{check_prefix_retrieval, DamConfig};
use crate::error::Result;
use crate::patterns::{mean_pairwise_hd_of, PatternSet};

pub const DEFAULT_MAX_K: usize = 50;
pub const DEFAULT_EXCLUDE_ABOVE: usize = 49;
pub const DEFAULT_EARLY_STOP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityPolicy {
    /// Largest prefix tried; clamped to the set size.
    pub max_k: usize,
    /// Results with `k_max` above this are flagged excluded. `None` disables.
    pub exclude_above: Option<usize>,
    /// Consecutive saturated results that end a series. `None` disables.
    pub early_stop_threshold: Option<usize>,
    pub assume_monotone: bool,
}

impl Default for CapacityPolicy {
    fn default() -> Self {
        CapacityPolicy {
            max_k: DEFAULT_MAX_K,
            exclude_above: Some(DEFAULT_EXCLUDE_ABOVE),
            early_stop_threshold: Some(DEFAULT_EARLY_STOP),
            assume_monotone: true,
        }
    }
}

impl CapacityPolicy {
    pub fn is_excluded(&self, k_max: usize) -> bool {
        self.exclude_above.is_some_and(|e| k_max > e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub k_max: usize,
    /// Mean pairwise HD of the first `k_max` patterns; absent below two.
    pub realized_mean_hd: Option<f64>,
    pub saturated: bool,
    pub excluded: bool,
    pub n_checks: usize,
    pub wall_time_ms: f64,
}

/// Search bounds and counters, independent of what the predicate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub k_max: usize,
    pub n_checks: usize,
}

/// Largest `K` in `[1, max_k]` with `pred(K)`, assuming `pred` holds on a
/// prefix of that range. Returns `0` if `pred(1)` fails.
///
/// Tries `max_k` first, since saturated subsets are common at high degree,
/// then bisects `(0, max_k)`. At most `ceil(log2(max_k)) + 1` calls.
pub fn binary_search_last_true<E>(
    max_k: usize,
    mut pred: impl FnMut(usize) -> std::result::Result<bool, E>,
) -> std::result::Result<SearchOutcome, E> {
    if max_k == 0 {
        return Ok(SearchOutcome {
            k_max: 0,
            n_checks: 0,
        });
    }
    let mut n_checks = 1;
    if pred(max_k)? {
        return Ok(SearchOutcome {
            k_max: max_k,
            n_checks,
        });
    }
    // pred(lo) holds (lo = 0 vacuously), pred(hi) fails
    let (mut lo, mut hi) = (0usize, max_k);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        n_checks += 1;
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SearchOutcome {
        k_max: lo,
        n_checks,
    })
}

/// Result of scanning every prefix size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearScan {
    /// Largest `K` before the first failing prefix.
    pub first_failure_k_max: usize,
    /// Largest succeeding `K` anywhere in the range.
    pub global_k_max: usize,
    pub monotone: bool,
    pub n_checks: usize,
}

pub fn linear_scan<E>(
    max_k: usize,
    mut pred: impl FnMut(usize) -> std::result::Result<bool, E>,
) -> std::result::Result<LinearScan, E> {
    let mut first_failure = None;
    let mut global = 0;
    for k in 1..=max_k {
        if pred(k)? {
            global = k;
        } else if first_failure.is_none() {
            first_failure = Some(k - 1);
        }
    }
    let first_failure_k_max = first_failure.unwrap_or(max_k);
    Ok(LinearScan {
        first_failure_k_max,
        global_k_max: global,
        monotone: global == first_failure_k_max,
        n_checks: max_k,
    })
}

fn effective_max_k(patterns: &PatternSet, policy: &CapacityPolicy) -> usize {
    policy.max_k.min(patterns.len())
}

fn finish(
    patterns: &PatternSet,
    policy: &CapacityPolicy,
    max_k: usize,
    k_max: usize,
    n_checks: usize,
    started: Instant,
) -> Result<CapacityResult> {
    let realized_mean_hd = if k_max >= 2 {
        Some(mean_pairwise_hd_of(&patterns.patterns()[..k_max])?)
    } else {
        None
    };
    Ok(CapacityResult {
        k_max,
        realized_mean_hd,
        saturated: k_max == max_k,
        excluded: policy.is_excluded(k_max),
        n_checks,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// `K_max` by binary search over prefix sizes, or by a full scan when the
/// policy does not assume monotonicity.
pub fn find_kmax(
    patterns: &PatternSet,
    config: &DamConfig,
    policy: &CapacityPolicy,
) -> Result<CapacityResult> {
    let started = Instant::now();
    let max_k = effective_max_k(patterns, policy);
    if !policy.assume_monotone {
        let scan = linear_scan(max_k, |k| check_prefix_retrieval(patterns, k, config))?;
        return finish(
            patterns,
            policy,
            max_k,
            scan.first_failure_k_max,
            scan.n_checks,
            started,
        );
    }
    let outcome = binary_search_last_true(max_k, |k| check_prefix_retrieval(patterns, k, config))?;
    // one stored pattern is always a fixed point
    debug_assert!(outcome.k_max >= 1, "single-memory retrieval failed");
    finish(
        patterns,
        policy,
        max_k,
        outcome.k_max,
        outcome.n_checks,
        started,
    )
}

/// Linear-scan capacity plus the scan details used to audit monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCapacity {
    /// Uses first-failure semantics for `k_max`.
    pub result: CapacityResult,
    pub global_k_max: usize,
    pub monotone: bool,
}

pub fn find_kmax_linear(
    patterns: &PatternSet,
    config: &DamConfig,
    policy: &CapacityPolicy,
) -> Result<LinearCapacity> {
    let started = Instant::now();
    let max_k = effective_max_k(patterns, policy);
    let scan = linear_scan(max_k, |k| check_prefix_retrieval(patterns, k, config))?;
    Ok(LinearCapacity {
        result: finish(
            patterns,
            policy,
            max_k,
            scan.first_failure_k_max,
            scan.n_checks,
            started,
        )?,
        global_k_max: scan.global_k_max,
        monotone: scan.monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EarlyStop {
    Continue,
    Stop,
}

/// Stops a series once its last `early_stop_threshold` results are all
/// saturated. Results must be ordered by ascending separation.
pub fn apply_early_stop(results_so_far: &[CapacityResult], policy: &CapacityPolicy) -> EarlyStop {
    let Some(threshold) = policy.early_stop_threshold else {
        return EarlyStop::Continue;
    };
    if threshold == 0 || results_so_far.len() < threshold {
        return EarlyStop::Continue;
    }
    let tail = &results_so_far[results_so_far.len() - threshold..];
    if tail.iter().all(|r| r.saturated) {
        EarlyStop::Stop
    } else {
        EarlyStop::Continue
    }
}
