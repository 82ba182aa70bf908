use serde::{Deserialize, Serialize};

use super::{check_finite, orient, BBox, Point, REL_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        Triangle { a, b, c }
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * orient(self.a, self.b, self.c)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&[self.a, self.b, self.c]).expect("three points")
    }

    /// Same triangle with counter-clockwise vertices.
    pub fn ccw(&self) -> Triangle {
        if self.signed_area() < 0.0 {
            Triangle::new(self.a, self.c, self.b)
        } else {
            *self
        }
    }

    pub fn shortest_side(&self) -> f64 {
        self.a.dist(self.b).min(self.b.dist(self.c)).min(self.c.dist(self.a))
    }

    /// `true` when `area < rel_tol * scale^2`.
    pub fn is_degenerate(&self, scale: f64, rel_tol: f64) -> bool {
        self.area() < rel_tol * scale * scale
    }

    /// Open-triangle membership for a CCW triangle: every orientation must
    /// exceed `tol` (an area-scaled tolerance). Points on an edge are outside.
    #[inline]
    pub fn strictly_contains_ccw(&self, p: Point, tol: f64) -> bool {
        orient(self.a, self.b, p) > tol && orient(self.b, self.c, p) > tol && orient(self.c, self.a, p) > tol
    }

    /// Horizontal chord `[x_lo, x_hi]` of the closed triangle at height `y`.
    fn chord(&self, y: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (p, q) in [(self.a, self.b), (self.b, self.c), (self.c, self.a)] {
            let (y0, y1) = (p.y.min(q.y), p.y.max(q.y));
            if y < y0 || y > y1 {
                continue;
            }
            if p.y == q.y {
                lo = lo.min(p.x.min(q.x));
                hi = hi.max(p.x.max(q.x));
            } else {
                let x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn area_tol(scale: f64) -> f64 {
    REL_TOL * scale * scale
}

fn check_triangle(tri: &Triangle, scale: f64) -> Result<Triangle> {
    if tri.is_degenerate(scale, REL_TOL) {
        return Err(Error::DegenerateTriangle { area: tri.area() });
    }
    Ok(tri.ccw())
}

/// Uniform bucket grid for counting sample points inside triangles.
///
/// Cell side is about `diam / sqrt(n)`, so a cell holds O(1) points on
/// average. A query walks the cells overlapping the triangle row by row;
/// cells whose four corners are strictly inside contribute their whole
/// count, boundary cells are tested point by point with the same predicate
/// as [`count_points_in_triangle_naive`].
#[derive(Debug, Clone)]
pub struct TriangleCounter {
    points: Vec<Point>,
    /// original index of each bucketed point, cell-major
    order: Vec<usize>,
    sorted: Vec<Point>,
    cell_start: Vec<usize>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    tol: f64,
    scale: f64,
}

impl TriangleCounter {
    pub fn new(points: &[Point]) -> Result<Self> {
        check_finite(points)?;
        let bbox = BBox::of_points(points)
            .ok_or_else(|| Error::DegenerateInput("no points to index".into()))?;
        let scale = bbox.scale();
        let n = points.len().max(1) as f64;
        let diag = (bbox.width().powi(2) + bbox.height().powi(2)).sqrt().max(scale);
        let cell = (diag / n.sqrt()).max(scale * 1e-9);
        let nx = ((bbox.width() / cell).floor() as usize + 1).max(1);
        let ny = ((bbox.height() / cell).floor() as usize + 1).max(1);

        let cell_of = |p: &Point| {
            let ix = (((p.x - bbox.min.x) / cell) as usize).min(nx - 1);
            let iy = (((p.y - bbox.min.y) / cell) as usize).min(ny - 1);
            iy * nx + ix
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for p in points {
            counts[cell_of(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let cell_start = counts.clone();
        let mut fill = counts;
        let mut order = vec![0usize; points.len()];
        for (i, p) in points.iter().enumerate() {
            let c = cell_of(p);
            order[fill[c]] = i;
            fill[c] += 1;
        }
        let sorted = order.iter().map(|&i| points[i]).collect();
        Ok(TriangleCounter {
            points: points.to_vec(),
            order,
            sorted,
            cell_start,
            origin: bbox.min,
            cell,
            nx,
            ny,
            tol: area_tol(scale),
            scale,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Bounding-box scale used by the predicates.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Number of indexed points strictly inside `tri`, not counting the
    /// indices in `exclude`.
    pub fn count(&self, tri: &Triangle, exclude: &[usize]) -> Result<usize> {
        let tri = check_triangle(tri, self.scale)?;
        let mut total = 0usize;
        self.visit(&tri, |whole, range| {
            if whole {
                total += range.len();
            } else {
                for k in range {
                    if tri.strictly_contains_ccw(self.sorted[k], self.tol) {
                        total += 1;
                    }
                }
            }
        });
        // excluded points can only be inside if they duplicate an interior location
        for (k, &e) in exclude.iter().enumerate() {
            if exclude[..k].contains(&e) {
                continue;
            }
            if e < self.points.len() && tri.strictly_contains_ccw(self.points[e], self.tol) {
                total -= 1;
            }
        }
        Ok(total)
    }

    /// Whether point `idx` is strictly inside `tri`, with the predicate used
    /// by [`TriangleCounter::count`].
    pub fn strictly_inside(&self, tri: &Triangle, idx: usize) -> Result<bool> {
        let tri = check_triangle(tri, self.scale)?;
        Ok(tri.strictly_contains_ccw(self.points[idx], self.tol))
    }

    /// Calls `f(original_index)` for every point strictly inside `tri`.
    pub fn for_each_inside(&self, tri: &Triangle, mut f: impl FnMut(usize)) -> Result<()> {
        let tri = check_triangle(tri, self.scale)?;
        self.visit(&tri, |whole, range| {
            for k in range {
                if whole || tri.strictly_contains_ccw(self.sorted[k], self.tol) {
                    f(self.order[k]);
                }
            }
        });
        Ok(())
    }

    fn visit(&self, tri: &Triangle, mut f: impl FnMut(bool, std::ops::Range<usize>)) {
        let bb = tri.bbox();
        let row = |y: f64| (((y - self.origin.y) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        let col = |x: f64| (((x - self.origin.x) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        if bb.max.y < self.origin.y || bb.max.x < self.origin.x {
            return;
        }
        let (r0, r1) = (row(bb.min.y), row(bb.max.y));
        for iy in r0..=r1 {
            let y0 = self.origin.y + iy as f64 * self.cell;
            let y1 = y0 + self.cell;
            // x extent of the triangle within this band
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for y in [y0.max(bb.min.y), y1.min(bb.max.y)] {
                if let Some((a, b)) = tri.chord(y) {
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
            }
            for v in [tri.a, tri.b, tri.c] {
                if v.y >= y0 && v.y <= y1 {
                    lo = lo.min(v.x);
                    hi = hi.max(v.x);
                }
            }
            if lo > hi {
                continue;
            }
            let (c0, c1) = (col(lo), col(hi));
            let base = iy * self.nx;
            let (p, q) = self.inner_nodes(tri, y0, y1, c0, c1 + 1);
            let cells = |from: usize, to: usize| self.cell_start[base + from]..self.cell_start[base + to];
            if p < q {
                f(false, cells(c0, p));
                f(true, cells(p, q));
                f(false, cells(q, c1 + 1));
            } else {
                f(false, cells(c0, c1 + 1));
            }
        }
    }

    /// Lattice columns `p..=q` in `[lo, hi]` whose nodes on both horizontal
    /// lines `y0` and `y1` are strictly inside, so that the cells between
    /// `p` and `q` lie wholly inside. Returns an empty range when none are.
    fn inner_nodes(&self, tri: &Triangle, y0: f64, y1: f64, lo: usize, hi: usize) -> (usize, usize) {
        let (Some((a0, b0)), Some((a1, b1))) = (tri.chord(y0), tri.chord(y1)) else {
            return (1, 0);
        };
        let node = |x: f64| (x - self.origin.x) / self.cell;
        let mut p = node(a0.max(a1)).ceil().max(lo as f64) as usize;
        let mut q = node(b0.min(b1)).floor().min(hi as f64).max(0.0) as usize;
        let inside = |i: usize| {
            let x = self.origin.x + i as f64 * self.cell;
            tri.strictly_contains_ccw(Point::new(x, y0), self.tol) && tri.strictly_contains_ccw(Point::new(x, y1), self.tol)
        };
        while p <= q && !inside(p) {
            p += 1;
        }
        while q > p && !inside(q) {
            q -= 1;
        }
        if p > q || !inside(q) {
            return (1, 0);
        }
        (p, q)
    }
}

/// Points of `points` strictly inside `tri`, minus the `exclude` indices,
/// via the bucket grid.
pub fn count_points_in_triangle(points: &[Point], tri: &Triangle, exclude: &[usize]) -> Result<usize> {
    TriangleCounter::new(points)?.count(tri, exclude)
}

/// Linear scan with the same open-triangle predicate. Reference for the grid.
pub fn count_points_in_triangle_naive(points: &[Point], tri: &Triangle, exclude: &[usize]) -> Result<usize> {
    check_finite(points)?;
    let scale = BBox::of_points(points).map_or(1.0, |b| b.scale());
    let tri = check_triangle(tri, scale)?;
    let tol = area_tol(scale);
    Ok(points
        .iter()
        .enumerate()
        .filter(|(i, p)| !exclude.contains(i) && tri.strictly_contains_ccw(**p, tol))
        .count())
}
