//! Greedy selection of 50-pattern subsets toward target mean Hamming distances.
//!
//! With an IDX image file as the first argument the pool is the binarized
//! images; otherwise a synthetic pool mixing several skews is used.
//!
//! ```text
//! cargo run --release --example greedy_selection -- train-images-idx3-ubyte
//! ```

use damcap::generators::{greedy_select_with, linspace, sample_rademacher, GreedyConfig};
use damcap::ingest::{load_idx_pool, ThresholdRule, DEFAULT_THRESHOLD};
use damcap::patterns::{PatternSet, Source};
use damcap::Error;

fn synthetic_pool() -> damcap::Result<PatternSet> {
    let mut patterns = Vec::new();
    for (i, p) in linspace(0.55, 0.995, 12).into_iter().enumerate() {
        patterns.extend(sample_rademacher(p, 250, 784, i as u64)?.into_patterns());
    }
    PatternSet::new(patterns, Source::External)
}

fn main() -> damcap::Result<()> {
    let pool = match std::env::args().nth(1) {
        Some(path) => {
            load_idx_pool(&path, None)?.to_pattern_set(DEFAULT_THRESHOLD, ThresholdRule::AtLeast)?
        }
        None => synthetic_pool()?,
    };
    println!("pool: {} patterns", pool.len());

    // the two extremes lie outside what image data can reach
    let mut targets = vec![10.0];
    targets.extend(linspace(30.0, 190.0, 53));
    targets.push(250.0);

    let config = GreedyConfig::default();
    let mut reached = 0;
    for (i, &target) in targets.iter().enumerate() {
        match greedy_select_with(&pool, target, 50, i as u64, &config) {
            Ok(sel) => {
                reached += 1;
                println!(
                    "target {target:6.1}: realized {:7.2} after {} draws",
                    sel.realized_mean_hd, sel.draws
                );
            }
            Err(Error::InfeasibleTarget {
                accepted,
                realized_hd,
                ..
            }) => println!(
                "target {target:6.1}: infeasible, best effort {accepted} patterns at {}",
                realized_hd.map_or("-".into(), |h| format!("{h:.2}"))
            ),
            Err(e) => return Err(e),
        }
    }
    println!("{reached}/{} targets reached", targets.len());
    Ok(())
}
