//! Ground-truth planar sets, samplers and Monte Carlo references.

mod family;
mod mask;
mod montecarlo;
mod sampling;

use std::sync::Arc;

use crate::geometry::{polygon_area, BBox, Point};
use crate::error::{Error, Result};

pub use family::{analytic_d, analytic_m, Family, FamilyParam, FamilySet};
pub use mask::{
    load_mask, mask_measures, parse_mask_csv, parse_pgm, symmetric_difference_area, write_pgm, MaskMeasures, MaskSet,
};
pub use montecarlo::{
    kernel_fraction, kernel_fraction_grid, kernel_fraction_with, mc_l, mc_w, uniform_in_triangle, McValue,
};
pub use sampling::{
    read_cloud_csv, sample_from_mask, sample_uniform, sample_uniform_with, write_cloud, write_cloud_csv,
    PointCloud,
};

/// Proposal cap for rejection sampling.
pub const REJECTION_BUDGET: u64 = 10_000_000;

/// A compact planar set given by a membership oracle.
pub trait AnalyticSet: Send + Sync {
    /// Closed membership: boundary points are inside.
    fn contains(&self, p: Point) -> bool;
    /// Axis-aligned box containing the set.
    fn bbox(&self) -> BBox;
    /// Exact Lebesgue measure, when known.
    fn area(&self) -> Option<f64>;
    fn label(&self) -> String;
}

impl<T: AnalyticSet + ?Sized> AnalyticSet for &T {
    fn contains(&self, p: Point) -> bool {
        (**self).contains(p)
    }
    fn bbox(&self) -> BBox {
        (**self).bbox()
    }
    fn area(&self) -> Option<f64> {
        (**self).area()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: AnalyticSet + ?Sized> AnalyticSet for Box<T> {
    fn contains(&self, p: Point) -> bool {
        (**self).contains(p)
    }
    fn bbox(&self) -> BBox {
        (**self).bbox()
    }
    fn area(&self) -> Option<f64> {
        (**self).area()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: AnalyticSet + ?Sized> AnalyticSet for Arc<T> {
    fn contains(&self, p: Point) -> bool {
        (**self).contains(p)
    }
    fn bbox(&self) -> BBox {
        (**self).bbox()
    }
    fn area(&self) -> Option<f64> {
        (**self).area()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub bbox: BBox,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::InvalidConfig(format!("empty rectangle {min:?} .. {max:?}")));
        }
        Ok(Rect { bbox: BBox::new(min, max) })
    }

    pub fn unit() -> Self {
        Rect {
            bbox: BBox::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0)),
        }
    }
}

impl AnalyticSet for Rect {
    fn contains(&self, p: Point) -> bool {
        self.bbox.contains(p)
    }
    fn bbox(&self) -> BBox {
        self.bbox
    }
    fn area(&self) -> Option<f64> {
        Some(self.bbox.area())
    }
    fn label(&self) -> String {
        let (a, b) = (self.bbox.min, self.bbox.max);
        format!("rect[{},{}]x[{},{}]", a.x, b.x, a.y, b.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }
}

impl AnalyticSet for Disk {
    fn contains(&self, p: Point) -> bool {
        p.dist2(self.center) <= self.radius * self.radius
    }
    fn bbox(&self) -> BBox {
        BBox::new(self.center, self.center).expand(self.radius)
    }
    fn area(&self) -> Option<f64> {
        Some(std::f64::consts::PI * self.radius * self.radius)
    }
    fn label(&self) -> String {
        format!("disk({},{};{})", self.center.x, self.center.y, self.radius)
    }
}

/// Closed simple polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSet {
    vertices: Vec<Point>,
    area: f64,
    bbox: BBox,
}

impl PolygonSet {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let area = polygon_area(&vertices)?;
        let bbox = BBox::of_points(&vertices).expect("non-empty polygon");
        Ok(PolygonSet { vertices, area, bbox })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

impl AnalyticSet for PolygonSet {
    fn contains(&self, p: Point) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let ab = b.sub(a);
            let ap = p.sub(a);
            if ab.cross(ap) == 0.0 && ap.dot(ab) >= 0.0 && ap.dot(ab) <= ab.dot(ab) {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * ab.x / ab.y {
                inside = !inside;
            }
        }
        inside
    }
    fn bbox(&self) -> BBox {
        self.bbox
    }
    fn area(&self) -> Option<f64> {
        Some(self.area)
    }
    fn label(&self) -> String {
        format!("polygon({} vertices)", self.vertices.len())
    }
}

/// Image of a set under `x -> scale * x + offset`.
#[derive(Debug, Clone)]
pub struct Affine<S> {
    pub inner: S,
    pub scale: f64,
    pub offset: Point,
}

impl<S: AnalyticSet> Affine<S> {
    pub fn new(inner: S, scale: f64, offset: Point) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("scale must be positive, got {scale}")));
        }
        Ok(Affine { inner, scale, offset })
    }

    pub fn forward(&self, p: Point) -> Point {
        p.scale(self.scale).add(self.offset)
    }

    pub fn inverse(&self, p: Point) -> Point {
        p.sub(self.offset).scale(1.0 / self.scale)
    }
}

impl<S: AnalyticSet> AnalyticSet for Affine<S> {
    fn contains(&self, p: Point) -> bool {
        self.inner.contains(self.inverse(p))
    }
    fn bbox(&self) -> BBox {
        let b = self.inner.bbox();
        BBox::new(self.forward(b.min), self.forward(b.max))
    }
    fn area(&self) -> Option<f64> {
        self.inner.area().map(|a| a * self.scale * self.scale)
    }
    fn label(&self) -> String {
        format!("{}*{}+({},{})", self.scale, self.inner.label(), self.offset.x, self.offset.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_membership_is_closed() {
        let l = PolygonSet::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ])
        .unwrap();
        assert_eq!(l.area(), Some(3.0));
        assert!(l.contains(Point::new(0.5, 1.5)));
        assert!(!l.contains(Point::new(1.5, 1.5)));
        assert!(l.contains(Point::new(1.0, 1.5)));
        assert!(l.contains(Point::new(2.0, 0.0)));
    }

    #[test]
    fn affine_maps_membership_and_area() {
        let s = Affine::new(Rect::unit(), 2.0, Point::new(1.0, -1.0)).unwrap();
        assert_eq!(s.area(), Some(4.0));
        assert!(s.contains(Point::new(2.0, 0.0)));
        assert!(!s.contains(Point::new(0.5, 0.0)));
        assert_eq!(s.bbox().max, Point::new(3.0, 1.0));
    }
}
