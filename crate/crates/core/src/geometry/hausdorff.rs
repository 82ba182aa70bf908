use super::{NeighborIndex, Point};

/// Symmetric Hausdorff distance between two finite point sets.
///
/// Returns `None` if either set is empty.
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let directed = |from: &[Point], to: &[Point]| {
        let idx = NeighborIndex::new(to);
        from.iter().map(|&p| idx.nn_distance(p)).fold(0.0f64, f64::max)
    };
    Some(directed(a, b).max(directed(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_sets() {
        let a = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let b = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 3.0)];
        assert_eq!(hausdorff_distance(&a, &b), Some(3.0));
        assert_eq!(hausdorff_distance(&a, &a), Some(0.0));
        assert_eq!(hausdorff_distance(&a, &[]), None);
    }
}
