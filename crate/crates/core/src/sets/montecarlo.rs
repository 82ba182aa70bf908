use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_uniform_with, AnalyticSet};
use crate::error::{Error, Result};
use crate::geometry::{orient, Point, Triangle, REL_TOL};
use crate::rng::{substream, StreamRng};

/// Triangles smaller than this fraction of the squared set scale are redrawn.
const MIN_TRIANGLE_AREA: f64 = 1e-10;

/// A Monte Carlo reference value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McValue {
    pub value: f64,
    pub std_error: f64,
    pub draws: usize,
    /// Draws discarded and redrawn (degenerate triangles).
    pub redrawn: usize,
}

/// `W(S) = 1 - P((X1 + X2)/2 in S)` from `pairs` uniform pairs.
pub fn mc_w(set: &dyn AnalyticSet, pairs: usize, seed: u64) -> Result<McValue> {
    if pairs == 0 {
        return Err(Error::InvalidConfig("pairs must be at least 1".into()));
    }
    let mut rng = substream(seed, "mc_w", &[]);
    let pts = sample_uniform_with(set, 2 * pairs, &mut rng)?;
    let inside = pts
        .chunks_exact(2)
        .filter(|p| set.contains(p[0].midpoint(p[1])))
        .count();
    let p = inside as f64 / pairs as f64;
    Ok(McValue {
        value: 1.0 - p,
        std_error: (p * (1.0 - p) / pairs as f64).sqrt(),
        draws: pairs,
        redrawn: 0,
    })
}

/// `L(S) = 1 - E[mu(T ∩ S) / mu(T)]` over triangles `T` with uniform vertices
/// on `S`; each ratio is estimated with `kernel_points` points.
pub fn mc_l(set: &dyn AnalyticSet, triples: usize, kernel_points: usize, seed: u64) -> Result<McValue> {
    if triples == 0 || kernel_points == 0 {
        return Err(Error::InvalidConfig("triples and kernel_points must be at least 1".into()));
    }
    let scale = set.bbox().scale();
    let draws: Vec<(f64, usize)> = (0..triples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, "mc_l", &[i as u64]);
            let mut redrawn = 0;
            loop {
                let v = sample_uniform_with(set, 3, &mut rng)?;
                let tri = Triangle::new(v[0], v[1], v[2]);
                if tri.is_degenerate(scale, MIN_TRIANGLE_AREA) {
                    redrawn += 1;
                    continue;
                }
                return Ok((kernel_fraction_with(set, &tri, kernel_points, &mut rng)?, redrawn));
            }
        })
        .collect::<Result<_>>()?;
    let n = triples as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let var = if triples > 1 {
        draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(McValue {
        value: (1.0 - mean).clamp(0.0, 1.0),
        std_error: (var / n).sqrt(),
        draws: triples,
        redrawn: draws.iter().map(|d| d.1).sum(),
    })
}

/// Maps unit-square variates to a uniform point in the triangle.
pub fn uniform_in_triangle(tri: &Triangle, mut u: f64, mut v: f64) -> Point {
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    tri.a.add(tri.b.sub(tri.a).scale(u)).add(tri.c.sub(tri.a).scale(v))
}

fn check_triangle(tri: &Triangle) -> Result<()> {
    if tri.is_degenerate(tri.bbox().scale(), REL_TOL) {
        return Err(Error::DegenerateTriangle { area: tri.area() });
    }
    Ok(())
}

/// Monte Carlo estimate of `mu(tri ∩ set) / mu(tri)`.
pub fn kernel_fraction(set: &dyn AnalyticSet, tri: &Triangle, kernel_points: usize, seed: u64) -> Result<f64> {
    let mut rng = substream(seed, "kernel_fraction", &[]);
    kernel_fraction_with(set, tri, kernel_points, &mut rng)
}

pub fn kernel_fraction_with(
    set: &dyn AnalyticSet,
    tri: &Triangle,
    kernel_points: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    check_triangle(tri)?;
    if kernel_points == 0 {
        return Err(Error::InvalidConfig("kernel_points must be at least 1".into()));
    }
    let hits = (0..kernel_points)
        .filter(|_| set.contains(uniform_in_triangle(tri, rng.gen(), rng.gen())))
        .count();
    Ok(hits as f64 / kernel_points as f64)
}

/// Midpoint-rule quadrature of `mu(tri ∩ set) / mu(tri)` on a square
/// lattice with step `shortest side / 200`.
pub fn kernel_fraction_grid(set: &dyn AnalyticSet, tri: &Triangle) -> Result<f64> {
    check_triangle(tri)?;
    let t = tri.ccw();
    let h = t.shortest_side() / 200.0;
    let bb = t.bbox();
    let nx = (bb.width() / h).ceil() as usize;
    let ny = (bb.height() / h).ceil() as usize;
    let (mut inside_tri, mut inside_both) = (0usize, 0usize);
    for j in 0..ny {
        let y = bb.min.y + (j as f64 + 0.5) * h;
        for i in 0..nx {
            let p = Point::new(bb.min.x + (i as f64 + 0.5) * h, y);
            if orient(t.a, t.b, p) >= 0.0 && orient(t.b, t.c, p) >= 0.0 && orient(t.c, t.a, p) >= 0.0 {
                inside_tri += 1;
                if set.contains(p) {
                    inside_both += 1;
                }
            }
        }
    }
    Ok(inside_both as f64 / inside_tri.max(1) as f64)
}
