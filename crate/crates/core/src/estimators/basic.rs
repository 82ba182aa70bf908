use rand::Rng;

use super::{Diagnostics, EstimatorConfig, MeasureEstimate, MeasureKind};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, largest_empty_circle, r_convex_hull, BBox, NeighborIndex};
use crate::rng::substream;
use crate::sets::{PointCloud, REJECTION_BUDGET};

/// LEC radius over the diameter of the cloud.
pub fn estimate_d(cloud: &PointCloud) -> Result<MeasureEstimate> {
    let hull = convex_hull(&cloud.points)?;
    let lec = largest_empty_circle(&cloud.points)?;
    let diam = hull.diameter();
    let diagnostics = Diagnostics {
        hull_area: Some(hull.area()),
        lec_center: Some(lec.center),
        lec_radius: Some(lec.radius),
        diameter: Some(diam),
        ..Diagnostics::default()
    };
    Ok(MeasureEstimate::new(
        MeasureKind::D,
        lec.radius / diam,
        cloud.len(),
        &EstimatorConfig::default(),
        diagnostics,
    ))
}

/// Relative area of the convex hull not covered by the r-convex hull.
pub fn estimate_m(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    let hull = convex_hull(&cloud.points)?;
    let rhull = r_convex_hull(&cloud.points, cfg.r)?;
    let (ha, ra) = (hull.area(), rhull.area());
    let diagnostics = Diagnostics {
        hull_area: Some(ha),
        rhull_area: Some(ra),
        rhull_radius_too_small: Some(rhull.radius_too_small),
        ..Diagnostics::default()
    };
    Ok(MeasureEstimate::new(MeasureKind::M, (ha - ra) / ha, cloud.len(), cfg, diagnostics))
}

/// Share of midpoints of uniform pairs on `B(cloud, eps)` that fall outside it.
///
/// Proposals are uniform on the cloud's bounding box grown by `eps`, two
/// variates each; a proposal is kept when its nearest sample point is within
/// `eps`.
pub fn estimate_w(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    let bbox = BBox::of_points(&cloud.points).ok_or(Error::InsufficientPoints { needed: 1, got: 0 })?;
    crate::geometry::check_finite(&cloud.points)?;
    let m = cfg.m.unwrap_or(cloud.len());
    let index = NeighborIndex::new(&cloud.points);
    let inside = |p| index.nn_distance(p) <= cfg.eps;
    let region = bbox.expand(cfg.eps);
    let mut rng = substream(cfg.seed, "estimate_w", &[]);

    let needed = 2 * m as u64;
    let mut draws = Vec::with_capacity(2 * m);
    let mut proposals = 0u64;
    while (draws.len() as u64) < needed {
        if proposals >= REJECTION_BUDGET {
            return Err(Error::RejectionBudgetExceeded {
                proposals,
                accepted: draws.len() as u64,
                needed,
            });
        }
        proposals += 1;
        let p = region.lerp(rng.gen(), rng.gen());
        if inside(p) {
            draws.push(p);
        }
    }
    let outside = draws.chunks_exact(2).filter(|z| !inside(z[0].midpoint(z[1]))).count();
    let v = outside as f64 / m as f64;
    let diagnostics = Diagnostics {
        proposals: Some(proposals),
        acceptance_rate: Some(needed as f64 / proposals as f64),
        ..Diagnostics::default()
    };
    let mut est = MeasureEstimate::new(MeasureKind::W, v, cloud.len(), cfg, diagnostics);
    est.std_error = Some((v * (1.0 - v) / m as f64).sqrt());
    Ok(est)
}
