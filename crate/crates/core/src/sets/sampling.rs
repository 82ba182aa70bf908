use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AnalyticSet, MaskSet, REJECTION_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::{substream, StreamRng};

/// An i.i.d. sample with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub seed: Option<u64>,
    pub source: String,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, source: impl Into<String>) -> Self {
        PointCloud {
            points,
            seed: None,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Image of the cloud under `x -> scale * x + offset`.
    pub fn transformed(&self, scale: f64, offset: Point) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| p.scale(scale).add(offset)).collect(),
            seed: self.seed,
            source: self.source.clone(),
        }
    }
}

/// `n` uniform points on `set` by rejection from its bounding box.
pub fn sample_uniform(set: &dyn AnalyticSet, n: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = substream(seed, "sample_uniform", &[]);
    let points = sample_uniform_with(set, n, &mut rng)?;
    Ok(PointCloud {
        points,
        seed: Some(seed),
        source: set.label(),
    })
}

/// Rejection sampler on a caller-supplied stream. Proposals use two
/// variates each, in the order `(u, v)`.
pub fn sample_uniform_with(set: &dyn AnalyticSet, n: usize, rng: &mut StreamRng) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    if set.area() == Some(0.0) {
        return Err(Error::DegenerateInput(format!("{} has zero area", set.label())));
    }
    let bbox = set.bbox();
    let mut out = Vec::with_capacity(n);
    let mut proposals = 0u64;
    while out.len() < n {
        if proposals >= REJECTION_BUDGET {
            return Err(Error::RejectionBudgetExceeded {
                proposals,
                accepted: out.len() as u64,
                needed: n as u64,
            });
        }
        proposals += 1;
        let p = bbox.lerp(rng.gen(), rng.gen());
        if set.contains(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Picks `n` foreground pixels uniformly (with replacement) and places a
/// uniform point inside each.
pub fn sample_from_mask(mask: &MaskSet, n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    let on = mask.foreground();
    if on.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut rng = substream(seed, "sample_from_mask", &[]);
    let s = mask.pixel_size();
    let points = (0..n)
        .map(|_| {
            let (col, row) = on[rng.gen_range(0..on.len())];
            let lo = mask.pixel_min_corner(col, row);
            Point::new(lo.x + rng.gen::<f64>() * s, lo.y + rng.gen::<f64>() * s)
        })
        .collect();
    Ok(PointCloud {
        points,
        seed: Some(seed),
        source: mask.label(),
    })
}

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    y: f64,
}

/// Reads a cloud from CSV with header `x,y`.
pub fn read_cloud_csv(path: &Path) -> Result<PointCloud> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse(format!("{}: expected header x,y", path.display())));
    }
    let mut points = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(csv_error)?;
        points.push(Point::try_new(row.x, row.y)?);
    }
    if points.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    Ok(PointCloud::new(points, path.display().to_string()))
}

/// Writes a cloud as CSV with header `x,y` and LF line endings.
pub fn write_cloud_csv(cloud: &PointCloud, path: &Path) -> Result<()> {
    write_cloud(cloud, std::fs::File::create(path)?)
}

/// [`write_cloud_csv`] to any writer.
pub fn write_cloud<W: std::io::Write>(cloud: &PointCloud, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for p in &cloud.points {
        writer.serialize(Row { x: p.x, y: p.y }).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    } else {
        Error::Parse(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{Family, FamilySet, Rect};

    #[test]
    fn uniform_on_square() {
        let c = sample_uniform(&Rect::unit(), 1000, 1).unwrap();
        assert!(c.points.iter().all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
        let mean = c.points.iter().fold(Point::new(0.0, 0.0), |a, p| a.add(*p)).scale(1e-3);
        let tol = 4.0 / 1000f64.sqrt();
        assert!((mean.x - 0.5).abs() < tol && (mean.y - 0.5).abs() < tol);
    }

    #[test]
    fn hole_is_avoided() {
        let s = FamilySet::of(Family::A1, 0.9).unwrap();
        let c = sample_uniform(&s, 100, 2).unwrap();
        assert!(c.points.iter().all(|p| !(p.x.abs() < 0.9 && p.y.abs() < 0.9)));
    }

    #[test]
    fn same_seed_same_cloud() {
        let s = FamilySet::of(Family::A3, 0.5).unwrap();
        assert_eq!(sample_uniform(&s, 50, 9).unwrap(), sample_uniform(&s, 50, 9).unwrap());
        assert_ne!(sample_uniform(&s, 50, 9).unwrap(), sample_uniform(&s, 50, 10).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        struct Needle;
        impl AnalyticSet for Needle {
            fn contains(&self, _: Point) -> bool {
                false
            }
            fn bbox(&self) -> crate::geometry::BBox {
                Rect::unit().bbox
            }
            fn area(&self) -> Option<f64> {
                None
            }
            fn label(&self) -> String {
                "needle".into()
            }
        }
        assert!(matches!(
            sample_uniform(&Needle, 1, 0),
            Err(Error::RejectionBudgetExceeded { accepted: 0, .. })
        ));
    }

    #[test]
    fn mask_samples_stay_in_foreground() {
        let bits = (0..64).map(|i| (i / 8 + i % 8) % 2 == 0).collect();
        let m = MaskSet::new(8, 8, bits, 0.5).unwrap();
        let c = sample_from_mask(&m, 500, 3).unwrap();
        assert!(c.points.iter().all(|&p| m.contains(p)));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.csv");
        let c = PointCloud::new(vec![Point::new(0.1, -2.5), Point::new(1e-300, 3.0)], "test");
        write_cloud_csv(&c, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y\n") && !text.contains('\r'));
        assert_eq!(read_cloud_csv(&path).unwrap().points, c.points);
    }
}
