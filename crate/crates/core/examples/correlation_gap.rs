//! Synthetic vs image-derived subsets at matched separation.
//!
//! Builds the 53 greedy subsets from an IDX image file and the 50 artificial
//! subsets, measures both at a few degrees, and prints mean K_max per
//! separation bucket.
//!
//! ```text
//! cargo run --release --example correlation_gap -- train-images-idx3-ubyte
//! ```

use std::path::PathBuf;

use damcap::experiment::{
    bucketize, run_sweep_inputs, SweepConfig, SweepInput, DEFAULT_CENTERS, DEFAULT_LEEWAY,
};
use damcap::generators::{build_dataset, greedy_select_with, subset_seed, DatasetPlan};
use damcap::ingest::{load_idx_pool, ThresholdRule, DEFAULT_THRESHOLD};
use damcap::Source;

fn main() -> damcap::Result<()> {
    let Some(images) = std::env::args().nth(1) else {
        eprintln!("usage: correlation_gap IDX_IMAGES");
        std::process::exit(1);
    };
    let pool =
        load_idx_pool(&images, None)?.to_pattern_set(DEFAULT_THRESHOLD, ThresholdRule::AtLeast)?;

    let mut inputs: Vec<SweepInput> = build_dataset(&DatasetPlan::artificial(0), None)?
        .into_iter()
        .map(|s| SweepInput::new(format!("artificial-{:03}", s.id), "artificial", s.set))
        .collect();
    // infeasible targets are skipped rather than aborting the run
    let plan = DatasetPlan::pool_selected(0);
    for (id, &target) in plan.subset_specs.iter().enumerate() {
        if let Ok(sel) = greedy_select_with(
            &pool,
            target,
            plan.subset_size,
            subset_seed(0, id),
            &plan.greedy,
        ) {
            inputs.push(SweepInput::new(format!("mnist-{id:03}"), "mnist", sel.set));
        }
    }

    let mut config = SweepConfig::new(vec![], PathBuf::new());
    config.degree_grid = vec![6, 10, 20, 30];
    let records = run_sweep_inputs(&inputs, &config)?.records;

    println!(
        "{:>6} {:>3} {:>18} {:>18}",
        "bucket", "n", "synthetic (count)", "mnist (count)"
    );
    for bucket in bucketize(&records, &DEFAULT_CENTERS, DEFAULT_LEEWAY) {
        for &degree in &config.degree_grid {
            let cell = |src: Source| {
                let ks: Vec<f64> = bucket
                    .members
                    .iter()
                    .filter(|r| r.degree == degree && r.source == src)
                    .map(|r| r.k_max as f64)
                    .collect();
                if ks.is_empty() {
                    "-".to_string()
                } else {
                    format!(
                        "{:.1} ({})",
                        ks.iter().sum::<f64>() / ks.len() as f64,
                        ks.len()
                    )
                }
            };
            println!(
                "{:>6} {degree:>3} {:>18} {:>18}",
                bucket.center,
                cell(Source::Rademacher),
                cell(Source::ImagePool)
            );
        }
    }
    Ok(())
}
