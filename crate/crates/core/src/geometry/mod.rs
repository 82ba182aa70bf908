//! Planar geometry kernels.
//!
//! Predicates are plain `f64` with a tolerance scaled to the input's bounding
//! box (`1e-12 * scale` for lengths, `1e-12 * scale^2` for orientation
//! determinants). They are not robust against adversarially degenerate
//! input; random samples are degenerate with probability zero.

mod delaunay;
mod hausdorff;
mod hull;
mod kdtree;
mod lec;
mod rhull;
mod triangle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use delaunay::Triangulation;
pub use hausdorff::hausdorff_distance;
pub use hull::{convex_hull, diameter, polygon_area, ConvexPolygon};
pub use kdtree::NeighborIndex;
pub use lec::{largest_empty_circle, EmptyCircle};
pub use rhull::{arc_region_area, r_convex_hull, ArcRegion, BoundaryElement, BoundaryLoop};
pub use triangle::{count_points_in_triangle, count_points_in_triangle_naive, Triangle, TriangleCounter};

/// Relative tolerance of the geometric predicates.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Rejects NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(Error::NonFinite { x, y })
        }
    }

    #[inline]
    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    #[inline]
    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn dist2(self, o: Point) -> f64 {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        self.dist2(o).sqrt()
    }

    #[inline]
    pub fn midpoint(self, o: Point) -> Point {
        Point::new((self.x + o.x) * 0.5, (self.y + o.y) * 0.5)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Twice the signed area of `(a, b, c)`; positive when counter-clockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Center of the circle through three points, `None` when they are collinear.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let b = b.sub(a);
    let c = c.sub(a);
    let d = 2.0 * b.cross(c);
    if d == 0.0 {
        return None;
    }
    let bb = b.dot(b);
    let cc = c.dot(c);
    let ux = (c.y * bb - b.y * cc) / d;
    let uy = (b.x * cc - c.x * bb) / d;
    let center = Point::new(a.x + ux, a.y + uy);
    (center.x.is_finite() && center.y.is_finite()).then_some(center)
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn new(min: Point, max: Point) -> Self {
        BBox { min, max }
    }

    pub fn of_points(points: &[Point]) -> Option<BBox> {
        let first = *points.first()?;
        let mut b = BBox::new(first, first);
        for p in &points[1..] {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Largest side length, floored at 1e-300 so tolerances never vanish.
    pub fn scale(&self) -> f64 {
        self.width().max(self.height()).max(1e-300)
    }

    pub fn expand(&self, by: f64) -> BBox {
        BBox::new(
            Point::new(self.min.x - by, self.min.y - by),
            Point::new(self.max.x + by, self.max.y + by),
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Maps unit-square variates `(u, v)` into the box.
    #[inline]
    pub fn lerp(&self, u: f64, v: f64) -> Point {
        Point::new(self.min.x + u * self.width(), self.min.y + v * self.height())
    }
}

pub(crate) fn check_finite(points: &[Point]) -> Result<()> {
    match points.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
        Some(p) => Err(Error::NonFinite { x: p.x, y: p.y }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcenter_of_right_triangle_is_hypotenuse_midpoint() {
        let c = circumcenter(Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0)).unwrap();
        assert!((c.x - 1.0).abs() < 1e-15 && (c.y - 1.0).abs() < 1e-15);
        assert!(circumcenter(Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)).is_none());
    }

    #[test]
    fn try_new_rejects_nan() {
        assert!(Point::try_new(f64::NAN, 0.0).is_err());
        assert!(Point::try_new(0.0, f64::INFINITY).is_err());
        assert!(Point::try_new(1.0, 2.0).is_ok());
    }
}
