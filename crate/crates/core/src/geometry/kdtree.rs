use super::Point;

/// Static 2-d tree over a fixed point set.
///
/// Nodes are stored in an implicit layout: the node for the index range
/// `[lo, hi)` sits at `(lo + hi) / 2`, its children cover the two halves.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    points: Vec<Point>,
    ids: Vec<usize>,
    axis: Vec<u8>,
}

impl NeighborIndex {
    pub fn new(points: &[Point]) -> Self {
        let mut items: Vec<(Point, usize)> = points.iter().copied().zip(0..).collect();
        let mut axis = vec![0u8; items.len()];
        build(&mut items, &mut axis, 0);
        let (points, ids) = items.into_iter().unzip();
        NeighborIndex { points, ids, axis }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index (into the original slice) and distance of the closest point.
    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(q, 0, self.points.len(), &mut best);
        Some((self.ids[best.0], best.1.sqrt()))
    }

    /// Distance from `q` to the closest indexed point.
    ///
    /// Panics on an empty index.
    pub fn nn_distance(&self, q: Point) -> f64 {
        self.nearest(q).expect("nn_distance on an empty index").1
    }

    /// Original indices of all points with `|p - q| <= radius`, unsorted.
    pub fn within_radius(&self, q: Point, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(q, radius * radius, 0, self.points.len(), &mut out);
        out
    }

    fn search(&self, q: Point, lo: usize, hi: usize, best: &mut (usize, f64)) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let p = self.points[mid];
        let d2 = p.dist2(q);
        if d2 < best.1 {
            *best = (mid, d2);
        }
        let diff = if self.axis[mid] == 0 { q.x - p.x } else { q.y - p.y };
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(q, near.0, near.1, best);
        if diff * diff < best.1 {
            self.search(q, far.0, far.1, best);
        }
    }

    fn collect(&self, q: Point, r2: f64, lo: usize, hi: usize, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let p = self.points[mid];
        if p.dist2(q) <= r2 {
            out.push(self.ids[mid]);
        }
        let diff = if self.axis[mid] == 0 { q.x - p.x } else { q.y - p.y };
        if diff <= 0.0 || diff * diff <= r2 {
            self.collect(q, r2, lo, mid, out);
        }
        if diff >= 0.0 || diff * diff <= r2 {
            self.collect(q, r2, mid + 1, hi, out);
        }
    }
}

fn build(items: &mut [(Point, usize)], axis: &mut [u8], offset: usize) {
    if items.len() <= 1 {
        return;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (p, _) in items.iter() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let ax = if x1 - x0 >= y1 - y0 { 0u8 } else { 1u8 };
    let mid = items.len() / 2;
    let key = |e: &(Point, usize)| if ax == 0 { e.0.x } else { e.0.y };
    items.select_nth_unstable_by(mid, |a, b| key(a).total_cmp(&key(b)));
    axis[offset + mid] = ax;
    let (left, rest) = items.split_at_mut(mid);
    build(left, axis, offset);
    build(&mut rest[1..], axis, offset + mid + 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_point() {
        let idx = NeighborIndex::new(&[Point::new(0.0, 0.0)]);
        assert_eq!(idx.nn_distance(Point::new(3.0, 4.0)), 5.0);
        assert_eq!(idx.nn_distance(Point::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn empty_index_has_no_neighbor() {
        assert!(NeighborIndex::new(&[]).nearest(Point::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn radius_query_matches_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<Point> = (0..500).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let idx = NeighborIndex::new(&pts);
        for _ in 0..100 {
            let q = Point::new(rng.gen(), rng.gen());
            let mut got = idx.within_radius(q, 0.1);
            got.sort_unstable();
            let want: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].dist2(q) <= 0.01).collect();
            assert_eq!(got, want);
        }
    }
}
