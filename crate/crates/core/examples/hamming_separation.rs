//! Bit-packed patterns, Hamming distance, overlap and mean separation.

use damcap::generators::sample_rademacher;
use damcap::{hamming_distance, mean_pairwise_hd, overlap, Pattern};

fn main() -> damcap::Result<()> {
    let a = Pattern::from_bipolar(&[1, -1, 1, 1, -1, -1, 1, 1])?;
    let b = a.with_flipped(0).with_flipped(5);
    println!("a = {:?}", a.to_bipolar());
    println!("b = {:?}", b.to_bipolar());
    println!(
        "HD = {}, overlap = {}",
        hamming_distance(&a, &b)?,
        overlap(&a, &b)?
    );
    println!("HD(a, -a) = {}", hamming_distance(&a, &a.complement())?);

    for p in [0.5, 0.6, 0.75, 0.9, 1.0] {
        let set = sample_rademacher(p, 50, 784, 1)?;
        println!(
            "p = {p:.2}: mean pairwise HD {:7.2} (2p(1-p)N = {:7.2})",
            mean_pairwise_hd(&set)?,
            2.0 * p * (1.0 - p) * 784.0
        );
    }
    Ok(())
}
