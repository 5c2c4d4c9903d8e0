//! Single-neuron updates and the one-step retrieval test.

use damcap::dam::{
    exact_field_sign, fast_field_sign, is_fixed_point, update_sign, DamConfig, StoredMemory,
};
use damcap::generators::sample_rademacher;
use damcap::{check_prefix_retrieval, Pattern};

fn main() -> damcap::Result<()> {
    let memories = vec![
        Pattern::from_bipolar(&[1, 1, 1, 1])?,
        Pattern::from_bipolar(&[1, 1, 1, -1])?,
        Pattern::from_bipolar(&[1, 1, -1, 1])?,
    ];
    let state = memories[2].clone();
    for degree in 1..=3 {
        let m = StoredMemory::new(memories.clone(), DamConfig::new(4, degree)?.exact())?;
        println!(
            "n = {degree}: neuron 2 of {:?} -> {:+}, third memory fixed point: {}",
            state.to_bipolar(),
            update_sign(&m, &state, 2)?,
            is_fixed_point(&m, &state)?
        );
    }

    // Large degree: the exact path works with integers like 784^38.
    let set = sample_rademacher(0.8, 50, 784, 3)?;
    let m = StoredMemory::new(set.patterns()[..20].to_vec(), DamConfig::new(784, 38)?)?;
    let probe = &set.patterns()[0];
    println!(
        "n = 38, neuron 0: fast {:?}, exact {:?}",
        fast_field_sign(&m, probe, 0)?,
        exact_field_sign(&m, probe, 0)?
    );
    for k in [5, 20, 50] {
        let cfg = DamConfig::new(784, 6)?;
        println!(
            "n = 6: first {k} patterns retrieved: {}",
            check_prefix_retrieval(&set, k, &cfg)?
        );
    }
    Ok(())
}
