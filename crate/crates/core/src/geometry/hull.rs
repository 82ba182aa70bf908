use serde::{Deserialize, Serialize};

use super::{check_finite, orient, BBox, Point, REL_TOL};
use crate::error::{Error, Result};

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Builds the polygon from CCW vertices, checking convexity.
    pub fn from_ccw(vertices: Vec<Point>) -> Result<Self> {
        check_finite(&vertices)?;
        let n = vertices.len();
        if n < 3 {
            return Err(Error::DegenerateInput(format!("polygon with {n} vertices")));
        }
        let tol = REL_TOL * BBox::of_points(&vertices).map_or(1.0, |b| b.scale()).powi(2);
        for i in 0..n {
            let o = orient(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if o <= tol {
                return Err(Error::DegenerateInput(
                    "vertices are not strictly convex in counter-clockwise order".into(),
                ));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterator over the directed edges `(v[i], v[i+1])`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices).expect("non-empty polygon")
    }

    /// Closed containment with an absolute distance tolerance `tol`.
    pub fn contains_with_tol(&self, p: Point, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let len = a.dist(b);
            orient(a, b, p) >= -tol * len
        })
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_with_tol(p, REL_TOL * self.bbox().scale())
    }

    pub fn diameter(&self) -> f64 {
        calipers(&self.vertices)
    }
}

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub(crate) fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        s += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * s
}

/// Andrew's monotone chain. Collinear boundary points are dropped.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon> {
    check_finite(points)?;
    let hull = hull_vertices(points);
    if hull.len() < 3 {
        return Err(Error::DegenerateInput(
            "convex hull needs at least 3 non-collinear points".into(),
        ));
    }
    Ok(ConvexPolygon { vertices: hull })
}

fn hull_vertices(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = BBox::of_points(&pts).map_or(1.0, |b| b.scale());
    let tol = REL_TOL * scale * scale;
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Area of a simple polygon given in either orientation.
pub fn polygon_area(vertices: &[Point]) -> Result<f64> {
    check_finite(vertices)?;
    let n = vertices.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!("polygon with {n} vertices")));
    }
    if self_intersects(vertices) {
        return Err(Error::DegenerateInput("polygon is self-intersecting".into()));
    }
    let area = shoelace(vertices).abs();
    if area <= 0.0 {
        return Err(Error::DegenerateInput("polygon has zero area".into()));
    }
    Ok(area)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

fn self_intersects(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in (i + 1)..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

/// Largest pairwise distance, via rotating calipers on the hull.
pub fn diameter(points: &[Point]) -> Result<f64> {
    check_finite(points)?;
    if points.len() < 2 {
        return Err(Error::DegenerateInput("diameter needs at least 2 points".into()));
    }
    let hull = hull_vertices(points);
    Ok(match hull.len() {
        1 => 0.0,
        2 => hull[0].dist(hull[1]),
        _ => calipers(&hull),
    })
}

fn calipers(h: &[Point]) -> f64 {
    let n = h.len();
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let a = h[i];
        let b = h[(i + 1) % n];
        while orient(a, b, h[(j + 1) % n]) > orient(a, b, h[j]) {
            j = (j + 1) % n;
        }
        best = best.max(a.dist(h[j])).max(b.dist(h[j]));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn interior_point_is_dropped() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.2, 0.2)]).unwrap();
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);
        assert_eq!(h.area(), 0.5);
    }

    #[test]
    fn unit_square_hull() {
        let sq = [p(1.0, 1.0), p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.5, 0.0)];
        let h = convex_hull(&sq).unwrap();
        assert_eq!(h.len(), 4);
        assert_eq!(h.area(), 1.0);
    }

    #[test]
    fn collinear_input_is_rejected() {
        let pts: Vec<Point> = (0..10).map(|i| p(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(convex_hull(&pts), Err(Error::DegenerateInput(_))));
        assert!(convex_hull(&[p(0.0, 0.0), p(1.0, 1.0)]).is_err());
        // diameter still works on a segment
        assert!((diameter(&pts).unwrap() - (81.0f64 + 324.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn polygon_areas() {
        assert_eq!(polygon_area(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap(), 1.0);
        assert_eq!(polygon_area(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]).unwrap(), 0.5);
        let outer = [p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)];
        assert_eq!(polygon_area(&outer).unwrap(), 4.0);
        // clockwise is fine
        assert_eq!(polygon_area(&[p(0.0, 0.0), p(0.0, 1.0), p(1.0, 0.0)]).unwrap(), 0.5);
        // bow tie
        let bow = [p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert!(matches!(polygon_area(&bow), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn diameter_small_cases() {
        let tri = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert_eq!(diameter(&tri).unwrap(), 2f64.sqrt());
        let sq = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        assert!((diameter(&sq).unwrap() - 1.414_213_56).abs() < 1e-8);
        assert!(diameter(&[p(0.0, 0.0)]).is_err());
    }

    #[test]
    fn from_ccw_checks_orientation() {
        assert!(ConvexPolygon::from_ccw(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]).is_ok());
        assert!(ConvexPolygon::from_ccw(vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 0.0)]).is_err());
    }
}
