//! r-convex hulls.
//!
//! The r-convex hull of a point set is what remains of the plane after
//! removing every open disk of radius `r` that contains no sample point.
//! Its boundary is made of circular arcs of radius `r`: one arc for each
//! Delaunay edge `pq` with `|pq| <= 2r` that admits an empty radius-`r`
//! disk through `p` and `q` on exactly one side. Disks through `p` and `q`
//! form a pencil whose members on one side are nested, so emptiness only has
//! to be checked against the circumcircles of the two triangles adjacent to
//! the edge. Edges with empty disks on both sides bound no area and are
//! reported as dangling.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{convex_hull, NeighborIndex, Point, Triangulation, REL_TOL};
use crate::error::{Error, Result};

/// One piece of a region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryElement {
    Segment {
        start: Point,
        end: Point,
    },
    /// Arc of the circle `(center, radius)` starting at angle `start_angle`
    /// and turning by `sweep` radians (positive is counter-clockwise).
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl BoundaryElement {
    pub fn start(&self) -> Point {
        match *self {
            BoundaryElement::Segment { start, .. } => start,
            BoundaryElement::Arc {
                center,
                radius,
                start_angle,
                ..
            } => polar(center, radius, start_angle),
        }
    }

    pub fn end(&self) -> Point {
        match *self {
            BoundaryElement::Segment { end, .. } => end,
            BoundaryElement::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => polar(center, radius, start_angle + sweep),
        }
    }

    /// Contribution `1/2 * integral(x dy - y dx)` along the element, written
    /// as the chord term plus the signed circular segment.
    pub fn green_area(&self) -> f64 {
        match *self {
            BoundaryElement::Segment { start, end } => 0.5 * start.cross(end),
            BoundaryElement::Arc { radius, sweep, .. } => {
                let phi = sweep.abs();
                let segment = 0.5 * radius * radius * (phi - phi.sin());
                0.5 * self.start().cross(self.end()) + sweep.signum() * segment
            }
        }
    }
}

fn polar(c: Point, r: f64, angle: f64) -> Point {
    Point::new(c.x + r * angle.cos(), c.y + r * angle.sin())
}

/// Closed boundary loop; the region lies to its left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    pub elements: Vec<BoundaryElement>,
    /// Positive for outer loops, negative for holes.
    pub signed_area: f64,
}

impl BoundaryLoop {
    pub fn from_elements(elements: Vec<BoundaryElement>) -> Self {
        let signed_area = elements.iter().map(BoundaryElement::green_area).sum();
        BoundaryLoop { elements, signed_area }
    }

    pub fn is_hole(&self) -> bool {
        self.signed_area < 0.0
    }
}

/// Region bounded by straight edges and circular arcs, possibly with
/// several components and holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcRegion {
    pub loops: Vec<BoundaryLoop>,
    /// Radius of the arcs (`r` for r-hulls, `0` when there are no arcs).
    pub radius: f64,
    /// Edges with empty disks on both sides; they enclose no area.
    pub dangling_edges: usize,
    /// Set when the region is not a single hole-free component, which
    /// usually means `r` is small compared with the sample spacing.
    pub radius_too_small: bool,
}

impl ArcRegion {
    pub fn from_loops(loops: Vec<BoundaryLoop>, radius: f64) -> Self {
        let outer = loops.iter().filter(|l| !l.is_hole()).count();
        let holes = loops.len() - outer;
        ArcRegion {
            loops,
            radius,
            dangling_edges: 0,
            radius_too_small: outer != 1 || holes > 0,
        }
    }

    pub fn area(&self) -> f64 {
        arc_region_area(self)
    }

    pub fn outer_loops(&self) -> usize {
        self.loops.iter().filter(|l| !l.is_hole()).count()
    }

    pub fn holes(&self) -> usize {
        self.loops.iter().filter(|l| l.is_hole()).count()
    }

    /// Even-odd membership: parity of chord crossings, flipped inside the
    /// circular segment of every arc.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for l in &self.loops {
            for e in &l.elements {
                let (a, b) = (e.start(), e.end());
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                    if p.x < x {
                        inside = !inside;
                    }
                }
                if let BoundaryElement::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                } = *e
                {
                    if p.dist2(center) < radius * radius {
                        let mid = polar(center, radius, start_angle + 0.5 * sweep);
                        let chord = b.sub(a);
                        let side_p = chord.cross(p.sub(a));
                        let side_mid = chord.cross(mid.sub(a));
                        if (a == b) || side_p * side_mid > 0.0 {
                            inside = !inside;
                        }
                    }
                }
            }
        }
        inside
    }
}

/// Exact area: for each loop, shoelace over the element endpoints plus the
/// signed circular-segment areas. Holes carry negative orientation.
pub fn arc_region_area(region: &ArcRegion) -> f64 {
    region.loops.iter().map(|l| l.signed_area).sum::<f64>().max(0.0)
}

/// r-convex hull of `points`.
///
/// Every boundary point of the hull that is not a sample point lies on the
/// circle of an empty radius-`r` disk passing through two samples, i.e. an
/// empty disk whose centre sits on a Delaunay edge's bisector. For each edge
/// with such a disk on exactly one side, the minor arc between its endpoints
/// is a boundary candidate. Candidates are split where other empty-disk
/// circles cross them and each piece is kept only if its midpoint is not
/// within distance `r` of an empty-disk centre.
pub fn r_convex_hull(points: &[Point], r: f64) -> Result<ArcRegion> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("r-convex hull radius must be positive, got {r}")));
    }
    // rejects collinear input
    let hull = convex_hull(points)?;
    let scale = hull.bbox().scale();
    let dt = Triangulation::new(points)?;
    let centers: Vec<Option<Point>> = (0..dt.len()).map(|t| dt.circumcenter(t)).collect();

    let mut disks: Vec<Point> = Vec::new();
    let mut arcs: Vec<(Point, Point, Point)> = Vec::new();
    let mut dangling = 0usize;
    for (t, k) in dt.edges() {
        let (i, j) = dt.edge_vertices(t, k);
        let (p, q) = (dt.points[i], dt.points[j]);
        let half = 0.5 * p.dist(q);
        if half > r {
            continue;
        }
        let m = p.midpoint(q);
        let e = q.sub(p);
        // unit normal pointing into triangle t (left of p -> q)
        let normal = Point::new(-e.y, e.x).scale(1.0 / e.norm());
        let offset = |c: Option<Point>| c.map(|c| c.sub(m).dot(normal));
        let Some(t_left) = offset(centers[t]) else { continue };
        let t_right = match dt.neighbors[t][k] {
            Some(u) => match offset(centers[u]) {
                Some(v) => v,
                None => continue,
            },
            None => f64::NEG_INFINITY,
        };
        let h = (r * r - half * half).max(0.0).sqrt();
        let left = m.add(normal.scale(h));
        let right = m.sub(normal.scale(h));
        let left_empty = t_right <= h && h <= t_left;
        let right_empty = t_right <= -h && -h <= t_left;
        if left_empty {
            disks.push(left);
        }
        if right_empty {
            disks.push(right);
        }
        match (left_empty, right_empty) {
            (true, true) => dangling += 1,
            // the region lies outside the disk, to the left of travel
            (true, false) => arcs.push((q, p, left)),
            (false, true) => arcs.push((p, q, right)),
            (false, false) => {}
        }
    }

    let cover = Coverage {
        points,
        samples: NeighborIndex::new(points),
        disk_centers: &disks,
        disks: NeighborIndex::new(&disks),
        r,
    };
    let mut pieces = Vec::new();
    for &(from, to, center) in &arcs {
        clip_arc(from, to, center, &cover, &mut pieces);
    }
    let (loops, open) = link_pieces(&pieces, REL_TOL.sqrt() * scale);
    let mut region = ArcRegion::from_loops(loops, r);
    region.dangling_edges = dangling;
    region.radius_too_small |= dangling > 0 || open || region.loops.is_empty();
    Ok(region)
}

struct Coverage<'a> {
    points: &'a [Point],
    samples: NeighborIndex,
    disks: NeighborIndex,
    disk_centers: &'a [Point],
    r: f64,
}

impl Coverage<'_> {
    /// `true` when `x` lies in some open empty disk of radius `r`, that is,
    /// within distance `r` of the set of empty-disk centres.
    fn covered(&self, x: Point) -> bool {
        let r = self.r;
        let inner = r * (1.0 - 1e-9);
        let empty = |c: Point| self.samples.nn_distance(c) >= r * (1.0 - 1e-12);
        if !self.disks.within_radius(x, inner).is_empty() {
            return true;
        }
        if empty(x) {
            return true;
        }
        // centres sliding along a circle of radius r around one sample
        let near = self.samples.within_radius(x, 2.0 * inner);
        near.into_iter().any(|m| {
            let d = x.sub(self.points[m]);
            let len = d.norm();
            len > r * 1e-9 && empty(self.points[m].add(d.scale(r / len)))
        })
    }
}

/// Clockwise arc of radius `cover.r` around `center` from `from` to `to`,
/// split at crossings with other empty-disk circles; uncovered pieces are
/// appended to `out`.
fn clip_arc(from: Point, to: Point, center: Point, cover: &Coverage, out: &mut Vec<BoundaryElement>) {
    let r = cover.r;
    let start = from.sub(center);
    let start_angle = start.y.atan2(start.x);
    let phi = 2.0 * (from.dist(to) / (2.0 * r)).min(1.0).asin();
    let sweep = -phi;

    let mut cuts = vec![0.0, 1.0];
    for l in cover.disks.within_radius(center, 2.0 * r) {
        let c = cover.disk_centers[l];
        let d = c.dist(center);
        if d <= 1e-12 * r || d >= 2.0 * r {
            continue;
        }
        let mid = center.midpoint(c);
        let h = (r * r - 0.25 * d * d).max(0.0).sqrt();
        let u = c.sub(center).scale(1.0 / d);
        let n = Point::new(-u.y, u.x);
        for y in [mid.add(n.scale(h)), mid.sub(n.scale(h))] {
            if let Some(f) = arc_fraction(center, start_angle, sweep, y) {
                if f > 1e-12 && f < 1.0 - 1e-12 {
                    cuts.push(f);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut open: Option<f64> = None;
    for w in cuts.windows(2) {
        let (f0, f1) = (w[0], w[1]);
        let x = polar(center, r, start_angle + sweep * 0.5 * (f0 + f1));
        if cover.covered(x) {
            if let Some(s) = open.take() {
                out.push(sub_arc(center, r, start_angle, sweep, s, f0));
            }
        } else if open.is_none() {
            open = Some(f0);
        }
    }
    if let Some(s) = open {
        out.push(sub_arc(center, r, start_angle, sweep, s, 1.0));
    }
}

fn sub_arc(center: Point, radius: f64, start_angle: f64, sweep: f64, f0: f64, f1: f64) -> BoundaryElement {
    BoundaryElement::Arc {
        center,
        radius,
        start_angle: start_angle + sweep * f0,
        sweep: sweep * (f1 - f0),
    }
}

/// Unit tangent in the direction of travel at angle `a`.
fn arc_tangent(sweep: f64, angle: f64) -> Point {
    let s = sweep.signum();
    Point::new(-angle.sin() * s, angle.cos() * s)
}

/// Links boundary pieces into closed loops by matching endpoints within
/// `tol`. Where several pieces leave the same point, the walk takes the
/// first one clockwise from the incoming direction, which keeps the region
/// on its left.
fn link_pieces(pieces: &[BoundaryElement], tol: f64) -> (Vec<BoundaryLoop>, bool) {
    let starts: Vec<Point> = pieces.iter().map(BoundaryElement::start).collect();
    let start_index = NeighborIndex::new(&starts);
    let direction = |e: &BoundaryElement, at_end: bool| match *e {
        BoundaryElement::Segment { start, end } => end.sub(start),
        BoundaryElement::Arc { start_angle, sweep, .. } => {
            arc_tangent(sweep, if at_end { start_angle + sweep } else { start_angle })
        }
    };
    let mut used = vec![false; pieces.len()];
    let mut loops = Vec::new();
    let mut open = false;
    for first in 0..pieces.len() {
        if used[first] {
            continue;
        }
        let mut elements = Vec::new();
        let mut cur = first;
        loop {
            used[cur] = true;
            elements.push(pieces[cur]);
            let end = pieces[cur].end();
            let back = direction(&pieces[cur], true).scale(-1.0);
            let back_angle = back.y.atan2(back.x);
            let next = start_index
                .within_radius(end, tol)
                .into_iter()
                .filter(|&c| !used[c])
                .min_by(|&a, &b| {
                    let cw = |c: usize| {
                        let d = direction(&pieces[c], false);
                        let mut turn = back_angle - d.y.atan2(d.x);
                        while turn <= 0.0 {
                            turn += 2.0 * PI;
                        }
                        turn
                    };
                    cw(a).total_cmp(&cw(b)).then(a.cmp(&b))
                });
            match next {
                Some(n) => cur = n,
                None => {
                    open |= end.dist(starts[first]) > tol;
                    break;
                }
            }
        }
        loops.push(BoundaryLoop::from_elements(elements));
    }
    (loops, open)
}

/// Position of `y` along the arc as a fraction of the sweep.
fn arc_fraction(center: Point, start_angle: f64, sweep: f64, y: Point) -> Option<f64> {
    if sweep == 0.0 {
        return None;
    }
    let d = y.sub(center);
    let mut delta = (d.y.atan2(d.x) - start_angle) * sweep.signum();
    delta = delta.rem_euclid(2.0 * PI);
    Some(delta / sweep.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    fn segment_area(r: f64, chord: f64) -> f64 {
        let phi = 2.0 * (chord / (2.0 * r)).asin();
        0.5 * r * r * (phi - phi.sin())
    }

    #[test]
    fn full_disk_loop() {
        let r = 1.5;
        let l = BoundaryLoop::from_elements(vec![BoundaryElement::Arc {
            center: Point::new(2.0, -1.0),
            radius: r,
            start_angle: 0.3,
            sweep: 2.0 * PI,
        }]);
        let region = ArcRegion::from_loops(vec![l], r);
        assert!((region.area() - PI * r * r).abs() < 1e-12);
        assert!(region.contains(Point::new(2.0, -1.0)));
        assert!(!region.contains(Point::new(3.6, -1.0)));
    }

    #[test]
    fn square_loop_without_arcs() {
        let s = square();
        let elements = (0..4)
            .map(|i| BoundaryElement::Segment {
                start: s[i],
                end: s[(i + 1) % 4],
            })
            .collect();
        let region = ArcRegion::from_loops(vec![BoundaryLoop::from_elements(elements)], 0.0);
        assert_eq!(region.area(), 1.0);
        assert!(region.contains(Point::new(0.5, 0.5)));
        assert!(!region.contains(Point::new(1.5, 0.5)));
    }

    #[test]
    fn square_corners_large_radius() {
        let region = r_convex_hull(&square(), 10.0).unwrap();
        assert_eq!(region.loops.len(), 1);
        assert!(!region.radius_too_small);
        let want = 1.0 - 4.0 * segment_area(10.0, 1.0);
        assert!((region.area() - want).abs() < 1e-12, "{} vs {want}", region.area());
        let big = r_convex_hull(&square(), 1e4).unwrap().area();
        assert!(big < 1.0 && 1.0 - big < 1e-4);
    }

    #[test]
    fn triangle_bows_inward() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.8)];
        let circum = {
            let c = crate::geometry::circumcenter(pts[0], pts[1], pts[2]).unwrap();
            c.dist(pts[0])
        };
        let region = r_convex_hull(&pts, circum * 1.05).unwrap();
        let tri_area = 0.4;
        assert_eq!(region.loops.len(), 1);
        assert!(region.area() < tri_area && region.area() > 0.0);
        // below the circumradius every edge is dangling
        let tiny = r_convex_hull(&pts, circum * 0.95).unwrap();
        assert_eq!(tiny.area(), 0.0);
        assert!(tiny.radius_too_small);
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(r_convex_hull(&square(), 0.0).is_err());
        assert!(r_convex_hull(&square(), f64::NAN).is_err());
    }
}
