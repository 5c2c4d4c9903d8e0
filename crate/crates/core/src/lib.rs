//! Capacity lab for Dense Associative Memory (DAM).
//!
//! Builds binary pattern datasets with controlled mean Hamming separation,
//! from skewed i.i.d. sampling or greedy selection out of binarized images,
//! and measures the exact zero-error capacity `K_max` of a rectified-polynomial
//! DAM by binary search over stored prefixes.
//!
//! - [`patterns`]: bit-packed bipolar patterns, Hamming distance, overlap.
//! - [`dataset_file`]: the `DAMP` on-disk format.
//! - [`ingest`]: IDX parsing and binarization.
//! - [`generators`]: skewed Rademacher subsets and greedy selection.
//! - [`dam`]: exact and float stability checks.
//! - [`capacity`]: `K_max` search, linear oracle, early stopping.
//! - [`experiment`]: sweeps, buckets and report files.

pub mod capacity;
pub mod dam;
pub mod dataset_file;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod ingest;
pub mod patterns;

pub use capacity::{find_kmax, find_kmax_linear, CapacityPolicy, CapacityResult};
pub use dam::{check_prefix_retrieval, is_fixed_point, update_sign, DamConfig, StoredMemory};
pub use error::{Error, Result};
pub use patterns::{hamming_distance, mean_pairwise_hd, overlap, Pattern, PatternSet, Source};
