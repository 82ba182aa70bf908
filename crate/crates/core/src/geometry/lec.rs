use serde::{Deserialize, Serialize};

use super::{convex_hull, ConvexPolygon, Point, Triangulation, REL_TOL};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmptyCircle {
    pub center: Point,
    pub radius: f64,
}

/// Largest circle with center in the convex hull of `points` that has no
/// point strictly inside.
///
/// The optimum sits either at a Voronoi vertex inside the hull or where a
/// Voronoi edge crosses the hull boundary. Voronoi vertices are the
/// circumcenters of the Delaunay triangles and Voronoi edges join the
/// circumcenters of adjacent triangles (rays for hull edges), so all
/// candidates come out of one pass over the triangulation. Ties keep the
/// first candidate in triangle order.
pub fn largest_empty_circle(points: &[Point]) -> Result<EmptyCircle> {
    let hull = convex_hull(points)?;
    let dt = Triangulation::new(points)?;
    let tol = REL_TOL * hull.bbox().scale();

    let mut best = EmptyCircle {
        center: points[0],
        radius: 0.0,
    };
    let mut consider = |center: Point, radius: f64| {
        if radius > best.radius {
            best = EmptyCircle { center, radius };
        }
    };

    let centers: Vec<Option<Point>> = (0..dt.len()).map(|t| dt.circumcenter(t)).collect();
    for t in 0..dt.len() {
        if let Some(c) = centers[t] {
            if hull.contains_with_tol(c, tol) {
                consider(c, c.dist(dt.points[dt.triangles[t][0]]));
            }
        }
    }

    for (t, k) in dt.edges() {
        let Some(c0) = centers[t] else { continue };
        let (i, j) = dt.edge_vertices(t, k);
        let site = dt.points[i];
        let (dir, s_max) = match dt.neighbors[t][k] {
            Some(u) => match centers[u] {
                Some(c1) => (c1.sub(c0), 1.0),
                None => continue,
            },
            None => {
                // outward normal of a counter-clockwise edge
                let e = dt.points[j].sub(site);
                (Point::new(e.y, -e.x), f64::INFINITY)
            }
        };
        for x in boundary_crossings(&hull, c0, dir, s_max) {
            consider(x, x.dist(site));
        }
    }
    Ok(best)
}

/// Points where `origin + s * dir`, `s in [0, s_max]`, enters or leaves the
/// convex polygon (Cyrus-Beck clipping).
fn boundary_crossings(hull: &ConvexPolygon, origin: Point, dir: Point, s_max: f64) -> Vec<Point> {
    let mut lo = 0.0f64;
    let mut hi = s_max;
    let mut lo_clipped = false;
    let mut hi_clipped = false;
    for (a, b) in hull.edges() {
        let e = b.sub(a);
        let num = e.cross(origin.sub(a));
        let den = e.cross(dir);
        if den == 0.0 {
            if num < 0.0 {
                return Vec::new();
            }
            continue;
        }
        let s = -num / den;
        if den > 0.0 {
            if s > lo {
                lo = s;
                lo_clipped = true;
            }
        } else if s < hi {
            hi = s;
            hi_clipped = true;
        }
        if lo > hi {
            return Vec::new();
        }
    }
    let mut out = Vec::with_capacity(2);
    if lo_clipped {
        out.push(origin.add(dir.scale(lo)));
    }
    if hi_clipped && hi.is_finite() {
        out.push(origin.add(dir.scale(hi)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::NeighborIndex;
    use rand::{Rng, SeedableRng};

    #[test]
    fn square_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let c = largest_empty_circle(&pts).unwrap();
        assert!((c.center.x - 0.5).abs() < 1e-12 && (c.center.y - 0.5).abs() < 1e-12);
        assert!((c.radius - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
        let c = largest_empty_circle(&pts).unwrap();
        assert!((c.radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((c.center.x - 0.5).abs() < 1e-12 && (c.center.y - h / 3.0).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_hull_crossing() {
        // circumcenter lies outside; the best center is on the long edge
        let pts = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(2.0, 0.5)];
        let c = largest_empty_circle(&pts).unwrap();
        assert!(c.center.y.abs() < 1e-12);
        // equidistant from (0,0) and (2,0.5) on the x axis: x = 4.25/4
        assert!((c.radius - 1.0625).abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn center_is_empty_and_in_hull() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Point> = (0..400).map(|_| Point::new(rng.gen(), rng.gen::<f64>() * 2.0)).collect();
        let c = largest_empty_circle(&pts).unwrap();
        let idx = NeighborIndex::new(&pts);
        assert!((idx.nn_distance(c.center) - c.radius).abs() < 1e-9);
        assert!(convex_hull(&pts).unwrap().contains(c.center));
    }

    #[test]
    fn collinear_is_rejected() {
        let pts: Vec<Point> = (0..4).map(|i| Point::new(i as f64, 0.0)).collect();
        assert!(largest_empty_circle(&pts).is_err());
    }
}
