//! Binarize an IDX image file (optionally gzipped) and save it as a pool.
//!
//! ```text
//! cargo run --release --example ingest_mnist -- train-images-idx3-ubyte.gz \
//!     train-labels-idx1-ubyte.gz pool.damp
//! ```

use std::path::Path;

use damcap::dataset_file;
use damcap::ingest::{load_idx_pool, ThresholdRule, DEFAULT_THRESHOLD};
use damcap::patterns::mean_pairwise_hd_of;

fn main() -> damcap::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [images, labels, out] = args.as_slice() else {
        eprintln!("usage: ingest_mnist IMAGES LABELS OUT.damp");
        std::process::exit(1);
    };
    let pool = load_idx_pool(images, Some(Path::new(labels)))?;
    println!("{} images of {}x{}", pool.len(), pool.rows, pool.cols);

    let set = pool.to_pattern_set(DEFAULT_THRESHOLD, ThresholdRule::AtLeast)?;
    let head = &set.patterns()[..set.len().min(2000)];
    let on: usize = head.iter().map(|p| p.count_plus()).sum();
    println!(
        "+1 fraction (first {}): {:.3}",
        head.len(),
        on as f64 / (head.len() * set.n_neurons()) as f64
    );
    println!(
        "mean pairwise HD (first {}): {:.1}",
        head.len(),
        mean_pairwise_hd_of(head)?
    );

    if let Ok(balanced) = pool.balanced(100) {
        let b = balanced.to_pattern_set(DEFAULT_THRESHOLD, ThresholdRule::AtLeast)?;
        println!(
            "100 per digit: mean pairwise HD {:.1}",
            damcap::mean_pairwise_hd(&b)?
        );
    }
    dataset_file::save(&set, out)?;
    println!("saved {out}");
    Ok(())
}
