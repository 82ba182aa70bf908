//! r-convex hull against an independent membership test.
//!
//! `x` is outside the r-convex hull iff it lies within distance `r` of the
//! set `E` of centres of empty radius-`r` disks. The point of `E` closest to
//! `x` is `x` itself, the radial projection of `x` onto a circle of radius
//! `r` around a sample point, or a point where two such circles cross.

use noncvx::geometry::{convex_hull, r_convex_hull, NeighborIndex, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Membership test built from the sample alone, without triangulation.
struct Oracle<'a> {
    pts: &'a [Point],
    idx: NeighborIndex,
    /// empty-disk centres equidistant (distance r) from two samples
    vertices: NeighborIndex,
    r: f64,
}

impl<'a> Oracle<'a> {
    fn new(pts: &'a [Point], r: f64) -> Self {
        let idx = NeighborIndex::new(pts);
        let mut vertices = Vec::new();
        for (i, &p) in pts.iter().enumerate() {
            for j in idx.within_radius(p, 2.0 * r) {
                if j <= i {
                    continue;
                }
                let q = pts[j];
                let half = 0.5 * p.dist(q);
                if half >= r || half == 0.0 {
                    continue;
                }
                let m = p.midpoint(q);
                let e = q.sub(p).scale(1.0 / (2.0 * half));
                let n = Point::new(-e.y, e.x);
                let h = (r * r - half * half).sqrt();
                for c in [m.add(n.scale(h)), m.sub(n.scale(h))] {
                    if idx.nn_distance(c) >= r * (1.0 - 1e-12) {
                        vertices.push(c);
                    }
                }
            }
        }
        Oracle {
            pts,
            idx,
            vertices: NeighborIndex::new(&vertices),
            r,
        }
    }

    fn empty(&self, c: Point) -> bool {
        self.idx.nn_distance(c) >= self.r * (1.0 - 1e-12)
    }

    fn inside(&self, x: Point) -> bool {
        let r = self.r;
        if self.empty(x) {
            return false;
        }
        if !self.vertices.within_radius(x, r * (1.0 - 1e-12)).is_empty() {
            return false;
        }
        for i in self.idx.within_radius(x, 2.0 * r) {
            let d = x.sub(self.pts[i]);
            let len = d.norm();
            if len > 0.0 && len < 2.0 * r && self.empty(self.pts[i].add(d.scale(r / len))) {
                return false;
            }
        }
        true
    }
}

fn square_with_hole(n: usize, hole: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.x.abs() >= hole || p.y.abs() >= hole {
            out.push(p);
        }
    }
    out
}

fn check_against_oracle(pts: &[Point], r: f64, probes: usize, seed: u64) {
    let region = r_convex_hull(pts, r).unwrap();
    let oracle = Oracle::new(pts, r);
    let hull = convex_hull(pts).unwrap();
    let bb = hull.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut disagree = 0usize;
    for _ in 0..probes {
        let x = bb.lerp(rng.gen(), rng.gen());
        let inside = oracle.inside(x);
        if inside {
            hits += 1;
        }
        if inside != region.contains(x) {
            disagree += 1;
        }
    }
    let frac = hits as f64 / probes as f64;
    let mc_area = frac * bb.area();
    let se = bb.area() * (frac * (1.0 - frac) / probes as f64).sqrt();
    let area = region.area();
    assert!(
        (area - mc_area).abs() <= 3.0 * se + 1e-9,
        "r = {r}: exact {area}, oracle {mc_area} +- {se}"
    );
    assert_eq!(disagree, 0, "r = {r}: membership disagrees on {disagree} probes");
    assert!(area <= hull.area() + 1e-12);
}

#[test]
fn random_hull_area_matches_membership_oracle() {
    let pts = square_with_hole(500, 0.5, 1);
    for r in [0.08, 0.15, 0.3, 1.0] {
        check_against_oracle(&pts, r, 20_000, 2);
    }
}

#[test]
fn dense_sample_matches_oracle() {
    let pts = square_with_hole(2000, 0.5, 3);
    let region = r_convex_hull(&pts, 0.1).unwrap();
    assert_eq!(region.outer_loops(), 1);
    assert_eq!(region.holes(), 1);
    // boundary strips between the samples and the true edges are lost
    assert!(region.area() < 3.0 && region.area() > 2.6, "{}", region.area());
    check_against_oracle(&pts, 0.1, 50_000, 4);
}

#[test]
fn sparse_clouds_with_small_radius() {
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let pts: Vec<Point> = (0..60).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        for r in [0.12, 0.2, 0.35] {
            check_against_oracle(&pts, r, 5_000, seed);
        }
    }
}

#[test]
fn area_is_monotone_in_radius() {
    let pts = square_with_hole(400, 0.6, 5);
    let mut last = 0.0;
    for r in [0.05, 0.08, 0.1, 0.2, 0.4, 0.8, 2.0, 10.0, 1000.0] {
        let a = r_convex_hull(&pts, r).unwrap().area();
        assert!(a + 1e-12 >= last, "area fell from {last} to {a} at r = {r}");
        last = a;
    }
    let hull = convex_hull(&pts).unwrap().area();
    assert!(hull - last < 1e-3, "{hull} {last}");
}
