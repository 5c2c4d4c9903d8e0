//! Sweeps over datasets x polynomial degrees, bucketing and report emission.
//!
//! A sweep is a set of series, one per (collection, degree). Within a series
//! subsets are measured in ascending order of separation so the early-stop
//! rule can cut the tail once capacity saturates; distinct series run in
//! parallel. Records are sorted by `(dataset_id, degree)` before they leave
//! the sweep, so scheduling never changes the output.

pub mod bucket;
pub mod manifest;
pub mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{apply_early_stop, find_kmax, CapacityPolicy, CapacityResult, EarlyStop};
use crate::dam::{DamConfig, NumericPath, TieMode, DEFAULT_FAST_MARGIN};
use crate::dataset_file;
use crate::error::{Error, Result};
use crate::patterns::{mean_pairwise_hd_of, PatternSet, Source};

pub use bucket::{bucketize, HdBucket, DEFAULT_CENTERS, DEFAULT_LEEWAY};
pub use report::{emit_report, load_sweep_csv, read_sweep_csv, write_sweep_csv};

/// `6..=11`, then every other degree from 13 to 37.
pub fn default_degree_grid() -> Vec<u32> {
    (6..=11).chain((13..=37).step_by(2)).collect()
}

/// One measured (dataset, degree) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub dataset_id: String,
    pub source: Source,
    pub skew_p: Option<f64>,
    pub target_hd: Option<f64>,
    pub realized_mean_hd: Option<f64>,
    pub degree: u32,
    pub k_max: usize,
    pub saturated: bool,
    pub excluded: bool,
    pub n_checks: usize,
    pub wall_time_ms: f64,
    pub seed: u64,
    /// Not measured: filled in as saturated after the series stopped early.
    pub extrapolated: bool,
}

impl SweepRecord {
    pub const COLUMNS: [&'static str; 13] = [
        "dataset_id",
        "source",
        "skew_p",
        "target_hd",
        "realized_mean_hd",
        "degree",
        "k_max",
        "saturated",
        "excluded",
        "n_checks",
        "wall_time_ms",
        "seed",
        "extrapolated",
    ];

    /// Whether the record belongs in figure series.
    pub fn is_plottable(&self) -> bool {
        !self.excluded && !self.extrapolated
    }
}

/// A dataset that could not be loaded; the sweep continues without it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub error: String,
}

/// A subset ready to be measured.
#[derive(Debug, Clone)]
pub struct SweepInput {
    pub dataset_id: String,
    /// Early stopping is applied per collection and degree.
    pub collection: String,
    pub set: PatternSet,
}

impl SweepInput {
    pub fn new(
        dataset_id: impl Into<String>,
        collection: impl Into<String>,
        set: PatternSet,
    ) -> Self {
        SweepInput {
            dataset_id: dataset_id.into(),
            collection: collection.into(),
            set,
        }
    }
}

/// Model options shared by every cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub numeric_path: NumericPath,
    pub tie_mode: TieMode,
    pub fast_margin: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            numeric_path: NumericPath::FastFloatWithExactFallback,
            tie_mode: TieMode::Retain,
            fast_margin: DEFAULT_FAST_MARGIN,
        }
    }
}

impl ModelOptions {
    pub fn config(&self, n_neurons: usize, degree: u32) -> Result<DamConfig> {
        let mut c = DamConfig::new(n_neurons, degree)?
            .with_path(self.numeric_path)
            .with_tie_mode(self.tie_mode);
        c.fast_margin = self.fast_margin;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub degree_grid: Vec<u32>,
    /// Manifest files, dataset directories or single `.damp` files.
    pub datasets: Vec<PathBuf>,
    pub policy: CapacityPolicy,
    pub model: ModelOptions,
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(datasets: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        SweepConfig {
            degree_grid: default_degree_grid(),
            datasets,
            policy: CapacityPolicy::default(),
            model: ModelOptions::default(),
            out_dir,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<DatasetFailure>,
}

fn load_path(path: &Path) -> Result<Vec<SweepInput>> {
    let manifest_path = if path.is_dir() {
        Some(path.join(manifest::MANIFEST_NAME))
    } else if path.extension().is_some_and(|e| e == "jsonl") {
        Some(path.to_path_buf())
    } else {
        None
    };
    let display = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    match manifest_path {
        Some(mp) => {
            let base = mp.parent().unwrap_or(Path::new("."));
            let collection = if path.is_dir() {
                display(path)
            } else {
                display(base)
            };
            manifest::read_manifest(&mp)?
                .into_iter()
                .map(|e| {
                    let file = base.join(&e.file);
                    Ok(SweepInput::new(
                        display(&file),
                        collection.clone(),
                        dataset_file::load(&file)?,
                    ))
                })
                .collect()
        }
        None => {
            let set = dataset_file::load(path)?;
            Ok(vec![SweepInput::new(
                display(path),
                set.source.as_str(),
                set,
            )])
        }
    }
}

/// Loads every dataset path, collecting failures instead of aborting.
pub fn load_inputs(paths: &[PathBuf]) -> (Vec<SweepInput>, Vec<DatasetFailure>) {
    let mut inputs = Vec::new();
    let mut failures = Vec::new();
    for p in paths {
        match load_path(p) {
            Ok(mut v) => inputs.append(&mut v),
            Err(e) => failures.push(DatasetFailure {
                dataset: p.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    (inputs, failures)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    let (inputs, mut failures) = load_inputs(&config.datasets);
    let mut out = run_sweep_inputs(&inputs, config)?;
    failures.append(&mut out.failures);
    out.failures = failures;
    Ok(out)
}

fn record(input: &SweepInput, degree: u32, r: &CapacityResult, extrapolated: bool) -> SweepRecord {
    SweepRecord {
        dataset_id: input.dataset_id.clone(),
        source: input.set.source,
        skew_p: input.set.skew_p,
        target_hd: input.set.target_hd,
        realized_mean_hd: r.realized_mean_hd,
        degree,
        k_max: r.k_max,
        saturated: r.saturated,
        excluded: r.excluded,
        n_checks: r.n_checks,
        wall_time_ms: r.wall_time_ms,
        seed: input.set.seed,
        extrapolated,
    }
}

/// Measures one (collection, degree) series in ascending separation order.
fn run_series(
    inputs: &[&SweepInput],
    degree: u32,
    config: &SweepConfig,
) -> std::result::Result<Vec<SweepRecord>, (String, Error)> {
    let mut results: Vec<CapacityResult> = Vec::new();
    let mut records = Vec::with_capacity(inputs.len());
    let mut stopped = false;
    for input in inputs {
        let fail = |e: Error| (input.dataset_id.clone(), e);
        if stopped {
            let max_k = config.policy.max_k.min(input.set.len());
            let r = CapacityResult {
                k_max: max_k,
                realized_mean_hd: if max_k >= 2 {
                    Some(mean_pairwise_hd_of(&input.set.patterns()[..max_k]).map_err(fail)?)
                } else {
                    None
                },
                saturated: true,
                excluded: true,
                n_checks: 0,
                wall_time_ms: 0.0,
            };
            records.push(record(input, degree, &r, true));
            continue;
        }
        let dam = config
            .model
            .config(input.set.n_neurons(), degree)
            .map_err(fail)?;
        let r = find_kmax(&input.set, &dam, &config.policy).map_err(fail)?;
        log::debug!(
            "{} n={} k_max={} checks={}",
            input.dataset_id,
            degree,
            r.k_max,
            r.n_checks
        );
        records.push(record(input, degree, &r, false));
        results.push(r);
        if apply_early_stop(&results, &config.policy) == EarlyStop::Stop {
            stopped = true;
        }
    }
    Ok(records)
}

/// Runs the sweep over already-loaded inputs.
pub fn run_sweep_inputs(inputs: &[SweepInput], config: &SweepConfig) -> Result<SweepOutput> {
    // Order each collection by the separation of the full subset.
    let mut keyed: Vec<(f64, &SweepInput)> = Vec::with_capacity(inputs.len());
    let mut failures = Vec::new();
    for input in inputs {
        let hd = if input.set.len() >= 2 {
            mean_pairwise_hd_of(input.set.patterns())?
        } else {
            0.0
        };
        keyed.push((hd, input));
    }
    keyed.sort_by(|a, b| {
        a.1.collection
            .cmp(&b.1.collection)
            .then(a.0.total_cmp(&b.0))
            .then(a.1.dataset_id.cmp(&b.1.dataset_id))
    });
    let mut collections: Vec<Vec<&SweepInput>> = Vec::new();
    for (_, input) in keyed {
        match collections.last_mut() {
            Some(c) if c[0].collection == input.collection => c.push(input),
            _ => collections.push(vec![input]),
        }
    }
    let series: Vec<(&Vec<&SweepInput>, u32)> = collections
        .iter()
        .flat_map(|c| config.degree_grid.iter().map(move |&d| (c, d)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism.max(1))
        .build()
        .map_err(|e| Error::Spec(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        series
            .par_iter()
            .map(|(c, d)| run_series(c, *d, config))
            .collect()
    });

    let mut records = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(mut r) => records.append(&mut r),
            Err((dataset, e)) => failures.push(DatasetFailure {
                dataset,
                error: e.to_string(),
            }),
        }
    }
    records.sort_by(|a, b| {
        a.dataset_id
            .cmp(&b.dataset_id)
            .then(a.degree.cmp(&b.degree))
    });
    Ok(SweepOutput { records, failures })
}
