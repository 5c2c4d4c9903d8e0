//! Sweep the artificial dataset over a few degrees and write the report.
//!
//! ```text
//! cargo run --release --example artificial_sweep -- out/
//! ```

use std::path::PathBuf;

use damcap::experiment::report::exponential_fits;
use damcap::experiment::{
    bucketize, emit_report, run_sweep_inputs, SweepConfig, SweepInput, DEFAULT_CENTERS,
    DEFAULT_LEEWAY,
};
use damcap::generators::{build_dataset, DatasetPlan};

fn main() -> damcap::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "sweep-out".into()),
    );
    let inputs: Vec<SweepInput> = build_dataset(&DatasetPlan::artificial(0), None)?
        .into_iter()
        .map(|s| SweepInput::new(format!("artificial-{:03}", s.id), "artificial", s.set))
        .collect();

    let mut config = SweepConfig::new(vec![], out.clone());
    config.degree_grid = vec![4, 6, 8, 10, 15, 20];
    let sweep = run_sweep_inputs(&inputs, &config)?;
    let buckets = bucketize(&sweep.records, &DEFAULT_CENTERS, DEFAULT_LEEWAY);
    emit_report(&sweep.records, &buckets, &sweep.failures, &out)?;

    for fit in exponential_fits(&sweep.records) {
        println!(
            "n = {:2}: {:2} points, ln(k_max) slope {:.4}/HD, r = {:.3}",
            fit.degree,
            fit.n_points,
            fit.slope.unwrap_or(f64::NAN),
            fit.pearson_r.unwrap_or(f64::NAN)
        );
    }
    println!(
        "{} records, report in {}",
        sweep.records.len(),
        out.display()
    );
    Ok(())
}
