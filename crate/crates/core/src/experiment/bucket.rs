use serde::Serialize;

use super::SweepRecord;

pub const DEFAULT_LEEWAY: f64 = 10.0;
pub const DEFAULT_CENTERS: [f64; 6] = [40.0, 70.0, 100.0, 130.0, 160.0, 190.0];

/// Records whose realized separation lies within `center ± leeway`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HdBucket {
    pub center: f64,
    pub leeway: f64,
    pub members: Vec<SweepRecord>,
}

impl HdBucket {
    pub fn contains(&self, hd: f64) -> bool {
        (hd - self.center).abs() <= self.leeway
    }
}

/// Assigns each plottable record to every bucket whose band contains it.
/// Excluded and extrapolated records are left out; buckets may overlap.
pub fn bucketize(records: &[SweepRecord], centers: &[f64], leeway: f64) -> Vec<HdBucket> {
    assert!(leeway > 0.0, "bucket leeway must be positive");
    if records.is_empty() {
        return Vec::new();
    }
    centers
        .iter()
        .map(|&center| {
            let mut bucket = HdBucket {
                center,
                leeway,
                members: Vec::new(),
            };
            bucket.members = records
                .iter()
                .filter(|r| r.is_plottable())
                .filter(|r| r.realized_mean_hd.is_some_and(|hd| bucket.contains(hd)))
                .cloned()
                .collect();
            bucket
        })
        .collect()
}
