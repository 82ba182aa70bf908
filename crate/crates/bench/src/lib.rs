//! Fixtures shared by the benchmarks.

use noncvx::sets::{sample_uniform, Family, FamilySet};
use noncvx::PointCloud;

/// `n` uniform points on `A1(0.5)`.
pub fn a1_cloud(n: usize, seed: u64) -> PointCloud {
    let set = FamilySet::of(Family::A1, 0.5).expect("valid parameter");
    sample_uniform(&set, n, seed).expect("sampling succeeds")
}
