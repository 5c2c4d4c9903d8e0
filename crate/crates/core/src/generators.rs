//! Pattern subsets with controlled mean Hamming separation.
//!
//! Two constructions: skewed Rademacher sampling, where the skew `p` sets the
//! expected pairwise distance `2p(1-p)N`, and greedy hill-climbing selection of
//! a subset from a fixed pool (binarized images) toward a target mean distance.
//!
//! Randomness comes from ChaCha8 keyed by `(seed, domain)` with the stream id
//! selecting the pattern or subset, so every subset is reproducible on its own
//! regardless of how subsets are scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::patterns::{mean_pairwise_hd_of, Pattern, PatternSet, Source};

const DOMAIN_RADEMACHER: u64 = 0x5241_4445; // "RADE"
const DOMAIN_GREEDY: u64 = 0x4752_4545; // "GREE"
const DOMAIN_SUBSET: u64 = 0x5355_4253; // "SUBS"

pub const DEFAULT_SUBSET_SIZE: usize = 50;
pub const DEFAULT_NEURONS: usize = 784;
pub const DEFAULT_BAND: f64 = 2.0;
pub const DEFAULT_RESTART_AFTER: usize = 1000;
pub const ARTIFICIAL_SUBSETS: usize = 50;
pub const POOL_SUBSETS: usize = 53;
pub const POOL_HD_RANGE: (f64, f64) = (30.0, 190.0);
pub const SKEW_STEP: f64 = 0.01;

/// Counter-based generator for `(seed, domain, stream)`.
pub fn keyed_rng(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Seed for subset `index` of a dataset built from `base_seed`.
pub fn subset_seed(base_seed: u64, index: usize) -> u64 {
    keyed_rng(base_seed, DOMAIN_SUBSET, index as u64).next_u64()
}

/// Expected pairwise Hamming distance of i.i.d. patterns with `P(+1) = p`.
pub fn expected_rademacher_hd(p: f64, n_neurons: usize) -> f64 {
    2.0 * p * (1.0 - p) * n_neurons as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherSpec {
    /// Probability of `+1`, in `(0.5, 1.0]`.
    pub p: f64,
    pub n_patterns: usize,
    pub n_neurons: usize,
    pub seed: u64,
}

impl RademacherSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.5 && self.p <= 1.0) {
            return Err(Error::Spec(format!("skew p = {} outside (0.5, 1]", self.p)));
        }
        if self.n_patterns == 0 || self.n_neurons == 0 {
            return Err(Error::Spec(
                "need at least one pattern and one neuron".into(),
            ));
        }
        Ok(())
    }
}

/// Samples `n_patterns` patterns with each neuron `+1` with probability `p`.
pub fn gen_skewed_rademacher(spec: &RademacherSpec) -> Result<PatternSet> {
    spec.validate()?;
    Ok(sample_rademacher(spec.p, spec.n_patterns, spec.n_neurons, spec.seed)?.with_skew_p(spec.p))
}

/// Sampler shared with [`gen_skewed_rademacher`]; accepts any `p` in `[0, 1]`,
/// including the unbiased `p = 0.5` used for saturation checks.
pub fn sample_rademacher(
    p: f64,
    n_patterns: usize,
    n_neurons: usize,
    seed: u64,
) -> Result<PatternSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Spec(format!("probability {p} outside [0, 1]")));
    }
    let patterns = (0..n_patterns)
        .map(|j| {
            let mut rng = keyed_rng(seed, DOMAIN_RADEMACHER, j as u64);
            Pattern::from_bools((0..n_neurons).map(|_| rng.random::<f64>() < p))
        })
        .collect();
    Ok(PatternSet::new(patterns, Source::Rademacher)?.with_seed(seed))
}

/// Acceptance rule for greedy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyMode {
    /// Track the subset's mean pairwise distance against `target ± band`.
    #[default]
    MeanBand,
    /// Accept a candidate only if its distance to every accepted pattern is at
    /// least the target.
    MinHd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    pub band: f64,
    /// Pool draws allowed per subset; `None` means `200 * subset_size`.
    pub max_trials: Option<usize>,
    /// Start over from a fresh first pattern after this many consecutive
    /// rejected draws. `None` never restarts.
    pub restart_after: Option<usize>,
    pub mode: GreedyMode,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            band: DEFAULT_BAND,
            max_trials: None,
            restart_after: Some(DEFAULT_RESTART_AFTER),
            mode: GreedyMode::MeanBand,
        }
    }
}

/// A subset chosen by [`greedy_select`].
#[derive(Debug, Clone)]
pub struct Selection {
    pub set: PatternSet,
    pub realized_mean_hd: f64,
    pub draws: usize,
}

/// Greedy hill-climbing selection with the default band and
/// `max_trials` pool draws.
pub fn greedy_select(
    pool: &PatternSet,
    target_hd: f64,
    subset_size: usize,
    seed: u64,
    max_trials: usize,
) -> Result<Selection> {
    let config = GreedyConfig {
        max_trials: Some(max_trials),
        ..GreedyConfig::default()
    };
    greedy_select_with(pool, target_hd, subset_size, seed, &config)
}

/// Distance from `mean` to the band `[target - band, target + band]`.
fn band_gap(mean: f64, target: f64, band: f64) -> f64 {
    ((mean - target).abs() - band).max(0.0)
}

/// Builds a subset by drawing pool patterns (with replacement) and keeping a
/// candidate only when it does not push the subset away from the target.
///
/// In [`GreedyMode::MeanBand`] the first pattern is uniform, the second must
/// land the pair inside the band, and every later candidate must leave the
/// mean no further from the band than before. Exact duplicates of accepted
/// patterns are rejected. If `restart_after` draws in a row are rejected the
/// subset is discarded and started again; all draws count toward `max_trials`.
/// On failure the largest partial subset seen is returned as best effort.
pub fn greedy_select_with(
    pool: &PatternSet,
    target_hd: f64,
    subset_size: usize,
    seed: u64,
    config: &GreedyConfig,
) -> Result<Selection> {
    let n = pool.n_neurons();
    if subset_size < 2 {
        return Err(Error::Spec(
            "greedy selection needs subset_size >= 2".into(),
        ));
    }
    if pool.len() < subset_size {
        return Err(Error::InsufficientPatterns {
            needed: subset_size,
            actual: pool.len(),
        });
    }
    if !(0.0..=n as f64).contains(&target_hd) {
        return Err(Error::Spec(format!(
            "target HD {target_hd} outside [0, {n}]"
        )));
    }
    if config.band.is_nan() || config.band < 0.0 {
        return Err(Error::Spec(format!(
            "band {} must be non-negative",
            config.band
        )));
    }
    let max_trials = config.max_trials.unwrap_or(200 * subset_size);

    let mut rng = keyed_rng(seed, DOMAIN_GREEDY, 0);
    let members = pool.patterns();
    let mut accepted: Vec<&Pattern> = Vec::with_capacity(subset_size);
    // sum of HD over accepted pairs
    let mut hd_sum: u64 = 0;
    let mut best: (Vec<&Pattern>, u64) = (Vec::new(), 0);
    let mut draws = 0usize;
    let mut since_accept = 0usize;

    while accepted.len() < subset_size && draws < max_trials {
        if config.restart_after.is_some_and(|r| since_accept >= r) {
            if accepted.len() > best.0.len() {
                best = (std::mem::take(&mut accepted), hd_sum);
            }
            accepted.clear();
            hd_sum = 0;
            since_accept = 0;
        }
        let cand = &members[rng.random_range(0..members.len())];
        draws += 1;
        since_accept += 1;
        if accepted.is_empty() {
            accepted.push(cand);
            since_accept = 0;
            continue;
        }
        let mut cand_sum = 0u64;
        let mut cand_min = usize::MAX;
        let mut duplicate = false;
        for a in &accepted {
            let d = a.hd_unchecked(cand);
            if d == 0 && *a == cand {
                duplicate = true;
                break;
            }
            cand_sum += d as u64;
            cand_min = cand_min.min(d);
        }
        if duplicate {
            continue;
        }
        let k = accepted.len() as u64;
        let keep = match config.mode {
            GreedyMode::MinHd => cand_min as f64 >= target_hd,
            GreedyMode::MeanBand => {
                let new_mean = (hd_sum + cand_sum) as f64 / (k * (k + 1) / 2) as f64;
                let new_gap = band_gap(new_mean, target_hd, config.band);
                if k == 1 {
                    new_gap == 0.0
                } else {
                    let mean = hd_sum as f64 / (k * (k - 1) / 2) as f64;
                    new_gap <= band_gap(mean, target_hd, config.band)
                }
            }
        };
        if keep {
            hd_sum += cand_sum;
            accepted.push(cand);
            since_accept = 0;
        }
    }
    if accepted.len() < subset_size && best.0.len() > accepted.len() {
        (accepted, hd_sum) = best;
    }

    let k = accepted.len() as u64;
    let realized = (k >= 2).then(|| hd_sum as f64 / (k * (k - 1) / 2) as f64);
    let in_band = match (config.mode, realized) {
        (GreedyMode::MeanBand, Some(m)) => band_gap(m, target_hd, config.band) == 0.0,
        (GreedyMode::MinHd, Some(_)) => true,
        (_, None) => false,
    };
    let set = PatternSet::new(accepted.into_iter().cloned().collect(), pool.source)?
        .with_seed(seed)
        .with_target_hd(target_hd);

    if set.len() < subset_size || !in_band {
        return Err(Error::InfeasibleTarget {
            target: target_hd,
            trials: draws,
            accepted: set.len(),
            realized_hd: realized,
            best_effort: Box::new(set),
        });
    }
    Ok(Selection {
        set,
        realized_mean_hd: realized.expect("subset_size >= 2"),
        draws,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Artificial,
    PoolSelected,
}

/// Recipe for a full dataset of subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPlan {
    pub kind: PlanKind,
    /// Skew `p` per subset (artificial) or target HD per subset (pool).
    pub subset_specs: Vec<f64>,
    pub subset_size: usize,
    pub n_neurons: usize,
    pub base_seed: u64,
    pub step: f64,
    pub greedy: GreedyConfig,
}

impl DatasetPlan {
    /// 50 subsets with `p = 0.51, 0.52, ..., 1.00`.
    pub fn artificial(base_seed: u64) -> Self {
        let specs = (1..=ARTIFICIAL_SUBSETS)
            .map(|i| (50 + i) as f64 / 100.0)
            .collect();
        DatasetPlan {
            kind: PlanKind::Artificial,
            subset_specs: specs,
            subset_size: DEFAULT_SUBSET_SIZE,
            n_neurons: DEFAULT_NEURONS,
            base_seed,
            step: SKEW_STEP,
            greedy: GreedyConfig::default(),
        }
    }

    /// 53 subsets with targets evenly spaced over `[30, 190]`.
    pub fn pool_selected(base_seed: u64) -> Self {
        let (lo, hi) = POOL_HD_RANGE;
        DatasetPlan {
            kind: PlanKind::PoolSelected,
            subset_specs: linspace(lo, hi, POOL_SUBSETS),
            subset_size: DEFAULT_SUBSET_SIZE,
            n_neurons: DEFAULT_NEURONS,
            base_seed,
            step: (hi - lo) / (POOL_SUBSETS - 1) as f64,
            greedy: GreedyConfig::default(),
        }
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// One generated subset and its realized separation.
#[derive(Debug, Clone)]
pub struct Subset {
    pub id: usize,
    pub set: PatternSet,
    pub realized_mean_hd: f64,
}

/// Builds every subset of `plan`. Subsets are constructed in parallel; each
/// uses its own derived seed so the output does not depend on scheduling.
pub fn build_dataset(plan: &DatasetPlan, pool: Option<&PatternSet>) -> Result<Vec<Subset>> {
    match (plan.kind, pool) {
        (PlanKind::Artificial, Some(_)) => Err(Error::Spec("artificial plan takes no pool".into())),
        (PlanKind::PoolSelected, None) => {
            Err(Error::Spec("pool-selected plan needs a pool".into()))
        }
        (PlanKind::Artificial, None) => plan
            .subset_specs
            .par_iter()
            .enumerate()
            .map(|(id, &p)| {
                let spec = RademacherSpec {
                    p,
                    n_patterns: plan.subset_size,
                    n_neurons: plan.n_neurons,
                    seed: subset_seed(plan.base_seed, id),
                };
                let set = gen_skewed_rademacher(&spec)?;
                let realized_mean_hd = mean_pairwise_hd_of(set.patterns())?;
                Ok(Subset {
                    id,
                    set,
                    realized_mean_hd,
                })
            })
            .collect(),
        (PlanKind::PoolSelected, Some(pool)) => {
            if pool.n_neurons() != plan.n_neurons {
                return Err(Error::Dimension {
                    expected: plan.n_neurons,
                    actual: pool.n_neurons(),
                });
            }
            plan.subset_specs
                .par_iter()
                .enumerate()
                .map(|(id, &target)| {
                    let sel = greedy_select_with(
                        pool,
                        target,
                        plan.subset_size,
                        subset_seed(plan.base_seed, id),
                        &plan.greedy,
                    )?;
                    Ok(Subset {
                        id,
                        set: sel.set,
                        realized_mean_hd: sel.realized_mean_hd,
                    })
                })
                .collect()
        }
    }
}
