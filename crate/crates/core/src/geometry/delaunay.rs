use super::{check_finite, circumcenter, orient, Point};
use crate::error::{Error, Result};

/// Delaunay triangulation with triangle adjacency.
///
/// Triangles are counter-clockwise. Edge `k` of triangle `t` runs from
/// `triangles[t][k]` to `triangles[t][(k + 1) % 3]`, and `neighbors[t][k]`
/// is the triangle on the other side of that edge (`None` on the hull).
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub neighbors: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    pub fn new(points: &[Point]) -> Result<Self> {
        check_finite(points)?;
        let input: Vec<delaunator::Point> =
            points.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect();
        let dt = delaunator::triangulate(&input);
        if dt.triangles.is_empty() {
            return Err(Error::DegenerateInput(
                "triangulation is empty (points collinear or too few)".into(),
            ));
        }
        let nt = dt.triangles.len() / 3;
        let mut triangles = Vec::with_capacity(nt);
        let mut neighbors = Vec::with_capacity(nt);
        for t in 0..nt {
            let mut tri = [dt.triangles[3 * t], dt.triangles[3 * t + 1], dt.triangles[3 * t + 2]];
            let mut nb = [0, 1, 2].map(|k| {
                let h = dt.halfedges[3 * t + k];
                (h != delaunator::EMPTY).then_some(h / 3)
            });
            if orient(points[tri[0]], points[tri[1]], points[tri[2]]) < 0.0 {
                // reverse orientation; edge k=(0,1) becomes (0,2) etc.
                tri.swap(1, 2);
                nb = [nb[2], nb[1], nb[0]];
            }
            triangles.push(tri);
            neighbors.push(nb);
        }
        Ok(Triangulation {
            points: points.to_vec(),
            triangles,
            neighbors,
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn vertices(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.points[i])
    }

    pub fn circumcenter(&self, t: usize) -> Option<Point> {
        let [a, b, c] = self.vertices(t);
        circumcenter(a, b, c)
    }

    /// Undirected edges, each listed once as `(t, k)` with `t` the lower
    /// triangle index (or the only triangle for hull edges).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.triangles.len()).flat_map(move |t| {
            (0..3).filter_map(move |k| match self.neighbors[t][k] {
                Some(u) if u < t => None,
                _ => Some((t, k)),
            })
        })
    }

    /// Endpoints `(from, to)` of edge `k` of triangle `t`.
    pub fn edge_vertices(&self, t: usize, k: usize) -> (usize, usize) {
        (self.triangles[t][k], self.triangles[t][(k + 1) % 3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn random_triangulation_is_delaunay_and_consistent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..300).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let dt = Triangulation::new(&pts).unwrap();
        for t in 0..dt.len() {
            let [a, b, c] = dt.vertices(t);
            assert!(orient(a, b, c) > 0.0);
            let cc = dt.circumcenter(t).unwrap();
            let r2 = cc.dist2(a);
            for (i, p) in pts.iter().enumerate() {
                if dt.triangles[t].contains(&i) {
                    continue;
                }
                assert!(cc.dist2(*p) >= r2 * (1.0 - 1e-9), "point {i} inside circumcircle of {t}");
            }
            for k in 0..3 {
                if let Some(u) = dt.neighbors[t][k] {
                    let (p, q) = dt.edge_vertices(t, k);
                    let back = (0..3).find(|&j| dt.edge_vertices(u, j) == (q, p));
                    assert!(back.is_some(), "adjacency of {t} and {u} is not symmetric");
                    assert_eq!(dt.neighbors[u][back.unwrap()], Some(t));
                }
            }
        }
        // Euler: T = 2n - 2 - h for points in general position
        let hull_edges = dt.neighbors.iter().flatten().filter(|n| n.is_none()).count();
        assert_eq!(dt.len(), 2 * pts.len() - 2 - hull_edges);
    }

    #[test]
    fn collinear_points_are_rejected() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 0.0)).collect();
        assert!(Triangulation::new(&pts).is_err());
    }
}
