//! The 50-subset artificial dataset: one skew `p` per subset, from 0.51 to 1.
//!
//! Pass a directory to also write the `.damp` files and manifest.

use damcap::experiment::manifest::write_dataset_dir;
use damcap::generators::{build_dataset, expected_rademacher_hd, DatasetPlan};

fn main() -> damcap::Result<()> {
    let plan = DatasetPlan::artificial(0);
    let subsets = build_dataset(&plan, None)?;
    println!("{:>4} {:>6} {:>9} {:>9}", "id", "p", "realized", "expected");
    for s in subsets.iter().step_by(5).chain(subsets.last()) {
        let p = s.set.skew_p.unwrap();
        println!(
            "{:>4} {p:>6.2} {:>9.2} {:>9.2}",
            s.id,
            s.realized_mean_hd,
            expected_rademacher_hd(p, plan.n_neurons)
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        let manifest = write_dataset_dir(dir.as_ref(), "artificial", &subsets)?;
        println!("manifest: {}", manifest.display());
    }
    Ok(())
}
