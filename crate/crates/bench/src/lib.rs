//! Input generators shared by the benchmarks.

use bfnorm::{random_in_band, BoolFun, DegreeBand};

/// `count` seeded samples of `B(s, t, m)`.
pub fn band_samples(m: usize, band: DegreeBand, count: u64, seed: u64) -> Vec<BoolFun> {
    (0..count)
        .map(|i| random_in_band(m, band, seed.wrapping_add(i)).expect("valid band"))
        .collect()
}
