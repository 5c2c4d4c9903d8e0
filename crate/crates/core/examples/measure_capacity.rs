//! K_max by binary search, checked against the linear scan.

use damcap::capacity::{find_kmax, find_kmax_linear, CapacityPolicy};
use damcap::generators::sample_rademacher;
use damcap::DamConfig;

fn main() -> damcap::Result<()> {
    let policy = CapacityPolicy::default();
    for p in [0.9, 0.8, 0.7] {
        let set = sample_rademacher(p, 50, 784, 11)?;
        for degree in [2, 4, 8, 16] {
            let cfg = DamConfig::new(784, degree)?;
            let r = find_kmax(&set, &cfg, &policy)?;
            let lin = find_kmax_linear(&set, &cfg, &policy)?;
            println!(
                "p = {p} n = {degree:2}: k_max {:2} ({} checks, linear {:2}, monotone {}) hd {:>7} {}",
                r.k_max,
                r.n_checks,
                lin.result.k_max,
                lin.monotone,
                r.realized_mean_hd.map_or("-".into(), |h| format!("{h:.1}")),
                if r.excluded { "excluded" } else { "" }
            );
        }
    }
    Ok(())
}
