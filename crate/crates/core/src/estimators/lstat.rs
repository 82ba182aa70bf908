use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::subsets::{plan_subsets, SubsetPlan};
use super::{ConfidenceInterval, Diagnostics, EstimatorConfig, MeasureEstimate, MeasureKind};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, r_convex_hull, Point, Triangle, TriangleCounter};
use crate::rng::substream;
use crate::sets::{kernel_fraction_with, AnalyticSet, PointCloud};

/// Triangles with area below this fraction of the squared diameter are skipped.
pub const MIN_AREA_FRACTION: f64 = 1e-10;

const CHUNK: usize = 2048;

/// How the triangle kernel is evaluated.
#[derive(Clone, Copy)]
pub enum KernelMode<'a> {
    /// From interior sample counts, with this area of the set.
    Area(f64),
    /// By Monte Carlo integration against a known set.
    Set(&'a dyn AnalyticSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelStats {
    /// Estimated `h1(X_i)` for each sample point, clamped to `[0, 1]`.
    pub h1: Vec<f64>,
    pub mean: f64,
    /// Sample variance of `h1`.
    pub xi1: f64,
    pub triangles_per_point: usize,
    /// Order of the U-statistic whose first projection drives the variance.
    pub order: usize,
    /// Sample variance of that projection; equals `xi1` for order 3.
    pub projection_var: f64,
    /// `order * sqrt(projection_var / n)`
    pub std_error: f64,
}

impl KernelStats {
    /// Normal interval around `value`, clipped to `[0, 1]`.
    pub fn ci(&self, value: f64, level: f64) -> ConfidenceInterval {
        let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
        let half = z * self.std_error;
        ConfidenceInterval {
            level,
            low: (value - half).max(0.0),
            high: (value + half).min(1.0),
        }
    }
}

struct Context<'a> {
    points: &'a [Point],
    counter: TriangleCounter,
    min_area: f64,
}

impl<'a> Context<'a> {
    fn new(points: &'a [Point]) -> Result<Self> {
        let diam = convex_hull(points)?.diameter();
        Ok(Context {
            points,
            counter: TriangleCounter::new(points)?,
            min_area: MIN_AREA_FRACTION * diam * diam,
        })
    }

    /// `None` for triangles that are skipped.
    fn triangle(&self, i: usize, j: usize, k: usize) -> Option<Triangle> {
        let t = Triangle::new(self.points[i], self.points[j], self.points[k]);
        (t.area() >= self.min_area).then_some(t)
    }

    /// `1 - #R * area / ((n - 3) * mu(tri))`
    fn count_kernel(&self, tri: &Triangle, idx: [usize; 3], area: f64) -> Result<f64> {
        let n = self.points.len();
        let inside = self.counter.count(tri, &idx)?;
        Ok(1.0 - inside as f64 * area / ((n - 3) as f64 * tri.area()))
    }
}

/// Sums `f` over `items` in fixed-size chunks, reducing chunks in order so
/// the result does not depend on the thread count. Returns the sum, the
/// number of items that produced a value and the number skipped.
fn chunked_sum<T, F>(items: &[T], f: F) -> Result<(f64, u64, u64)>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<f64>> + Sync,
{
    let parts = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = (0.0, 0u64, 0u64);
            for item in chunk {
                match f(item)? {
                    Some(v) => {
                        acc.0 += v;
                        acc.1 += 1;
                    }
                    None => acc.2 += 1,
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .into_iter()
        .fold((0.0, 0, 0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2)))
}

fn require(cloud: &PointCloud, needed: usize) -> Result<()> {
    if cloud.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            got: cloud.len(),
        });
    }
    Ok(())
}

/// Area of the set used by the count-based kernels.
fn area_estimate(cloud: &PointCloud, cfg: &EstimatorConfig, diag: &mut Diagnostics) -> Result<f64> {
    if let Some(a) = cfg.area_override {
        diag.area_used = Some(a);
        return Ok(a);
    }
    let rhull = r_convex_hull(&cloud.points, cfg.r)?;
    let a = rhull.area();
    diag.rhull_area = Some(a);
    diag.rhull_radius_too_small = Some(rhull.radius_too_small);
    diag.area_used = Some(a);
    if a <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "r-convex hull with r = {} has zero area",
            cfg.r
        )));
    }
    Ok(a)
}

fn finish(
    measure: MeasureKind,
    sum: f64,
    used: u64,
    skipped: u64,
    total: u128,
    complete: bool,
    cloud: &PointCloud,
    cfg: &EstimatorConfig,
    mut diag: Diagnostics,
) -> Result<MeasureEstimate> {
    if used == 0 {
        return Err(Error::DegenerateInput("every sampled triangle is degenerate".into()));
    }
    diag.subsets_total = Some(u64::try_from(total).unwrap_or(u64::MAX));
    diag.subsets_used = Some(used);
    diag.subsets_skipped = Some(skipped);
    diag.complete = Some(complete);
    Ok(MeasureEstimate::new(measure, sum / used as f64, cloud.len(), cfg, diag))
}

fn attach(est: &mut MeasureEstimate, stats: &KernelStats, level: f64) {
    est.std_error = Some(stats.std_error);
    est.ci = Some(stats.ci(est.value, level));
    est.diagnostics.xi1 = Some(stats.xi1);
    est.diagnostics.xi1_triangles_per_point = Some(stats.triangles_per_point);
}

/// Count-based U-statistic over sample triangles: one minus the mean of
/// `#R * mu(S_n) / ((n - 3) * mu(T))`, where `#R` counts sample points
/// strictly inside `T`. All triangles are used when there are at most
/// `triple_budget`, otherwise a uniform sample of that many.
pub fn estimate_l_hat(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    require(cloud, 4)?;
    let mut diag = Diagnostics::default();
    let area = area_estimate(cloud, cfg, &mut diag)?;
    let ctx = Context::new(&cloud.points)?;
    let plan = l_hat_plan(cloud.len(), cfg)?;
    let pass = count_pass(&ctx, &plan.subsets, area, cfg.level.is_some())?;
    let mut est = finish(
        MeasureKind::LHat,
        pass.sum,
        pass.used,
        pass.skipped,
        plan.total,
        plan.complete,
        cloud,
        cfg,
        diag,
    )?;
    if let Some(level) = cfg.level {
        let weights = pass.weights.map(|w| (w, pass.used));
        let stats = kernel_stats(&ctx, KernelMode::Area(area), weights, cfg)?;
        attach(&mut est, &stats, level);
    }
    Ok(est)
}

fn l_hat_plan(n: usize, cfg: &EstimatorConfig) -> Result<SubsetPlan<3>> {
    let mut rng = substream(cfg.seed, "l_hat", &[]);
    plan_subsets::<3>(n, cfg.triple_budget, &mut rng)
}

struct CountPass {
    sum: f64,
    used: u64,
    skipped: u64,
    /// Per point, the sum of `1 / mu(T)` over used triangles strictly containing it.
    weights: Option<Vec<f64>>,
}

fn count_pass(ctx: &Context<'_>, subsets: &[[usize; 3]], area: f64, with_weights: bool) -> Result<CountPass> {
    if !with_weights {
        let (sum, used, skipped) = chunked_sum(subsets, |&[i, j, k]| {
            ctx.triangle(i, j, k)
                .map(|t| ctx.count_kernel(&t, [i, j, k], area))
                .transpose()
        })?;
        return Ok(CountPass {
            sum,
            used,
            skipped,
            weights: None,
        });
    }
    let n = ctx.points.len();
    let parts = subsets
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let (mut sum, mut used, mut skipped) = (0.0, 0u64, 0u64);
            for &[i, j, k] in chunk {
                let Some(t) = ctx.triangle(i, j, k) else {
                    skipped += 1;
                    continue;
                };
                let w = 1.0 / t.area();
                let mut inside = 0usize;
                ctx.counter.for_each_inside(&t, |x| {
                    if x != i && x != j && x != k {
                        acc[x] += w;
                        inside += 1;
                    }
                })?;
                sum += 1.0 - inside as f64 * area / ((n - 3) as f64 * t.area());
                used += 1;
            }
            Ok((sum, used, skipped, acc))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = CountPass {
        sum: 0.0,
        used: 0,
        skipped: 0,
        weights: Some(vec![0.0; n]),
    };
    for (sum, used, skipped, acc) in parts {
        out.sum += sum;
        out.used += used;
        out.skipped += skipped;
        for (t, a) in out.weights.iter_mut().flatten().zip(acc) {
            *t += a;
        }
    }
    Ok(out)
}

/// U-statistic with the exact kernel `1 - mu(T ∩ S) / mu(T)` for a known
/// set, the ratio integrated with `kernel_points` uniform points.
pub fn estimate_l_kernel(cloud: &PointCloud, set: &dyn AnalyticSet, cfg: &EstimatorConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    require(cloud, 3)?;
    let ctx = Context::new(&cloud.points)?;
    let mut rng = substream(cfg.seed, "l_kernel", &[]);
    let plan = plan_subsets::<3>(cloud.len(), cfg.triple_budget, &mut rng)?;
    let (sum, used, skipped) = chunked_sum(&plan.subsets, |&[i, j, k]| {
        let Some(t) = ctx.triangle(i, j, k) else {
            return Ok(None);
        };
        let mut rng = substream(cfg.seed, "l_kernel_points", &[i as u64, j as u64, k as u64]);
        Ok(Some(1.0 - kernel_fraction_with(set, &t, cfg.kernel_points, &mut rng)?))
    })?;
    let mut est = finish(
        MeasureKind::LKernel,
        sum,
        used,
        skipped,
        plan.total,
        plan.complete,
        cloud,
        cfg,
        Diagnostics::default(),
    )?;
    if let Some(level) = cfg.level {
        let stats = kernel_stats(&ctx, KernelMode::Set(set), None, cfg)?;
        attach(&mut est, &stats, level);
    }
    Ok(est)
}

/// Order-4 U-statistic with the kernel symmetrised over which point of the
/// quadruple is tested against the triangle of the other three:
/// `1 - mu(S_n)/4 * sum_x 1{x in T(Q \ x)} / mu(T(Q \ x))`.
/// A quadruple with a skipped triangle is skipped whole.
pub fn estimate_l_indicator(cloud: &PointCloud, cfg: &EstimatorConfig) -> Result<MeasureEstimate> {
    cfg.validate()?;
    require(cloud, 4)?;
    let mut diag = Diagnostics::default();
    let area = area_estimate(cloud, cfg, &mut diag)?;
    let ctx = Context::new(&cloud.points)?;
    let mut rng = substream(cfg.seed, "l_indicator", &[]);
    let budget = cfg.quadruple_budget.unwrap_or(cfg.triple_budget);
    let plan = plan_subsets::<4>(cloud.len(), budget, &mut rng)?;
    let (sum, used, skipped) = chunked_sum(&plan.subsets, |q| {
        let mut acc = 0.0;
        for drop in 0..4 {
            let [i, j, k] = match drop {
                0 => [q[1], q[2], q[3]],
                1 => [q[0], q[2], q[3]],
                2 => [q[0], q[1], q[3]],
                _ => [q[0], q[1], q[2]],
            };
            let Some(t) = ctx.triangle(i, j, k) else {
                return Ok(None);
            };
            if ctx.counter.strictly_inside(&t, q[drop])? {
                acc += 1.0 / t.area();
            }
        }
        Ok(Some(1.0 - 0.25 * area * acc))
    })?;
    finish(MeasureKind::LIndicator, sum, used, skipped, plan.total, plan.complete, cloud, cfg, diag)
}

/// Plug-in estimate of `xi1 = Var(h1(X))` and a normal interval for `L`.
///
/// `h1(X_i)` is the mean kernel over `max(1, triple_budget / n)` random
/// triangles having `X_i` as a vertex. With a known set the statistic has
/// order 3 and the standard error is `3 * sqrt(xi1 / n)`. The count-based
/// statistic is an order-4 U-statistic whose projection is
/// `g1(x) = 3/4 h1(x) + 1/4 (1 - mu(S_n) q(x))`, with `q(x)` the mean of
/// `1{x in T} / mu(T)` over the sampled triangles; its standard error is
/// `4 * sqrt(Var(g1) / n)`.
pub fn xi1_and_ci(
    cloud: &PointCloud,
    mode: KernelMode<'_>,
    value: f64,
    level: f64,
    cfg: &EstimatorConfig,
) -> Result<(KernelStats, ConfidenceInterval)> {
    cfg.validate()?;
    require(cloud, 10)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "level",
            value: level,
            min: 0.0,
            max: 1.0,
        });
    }
    let ctx = Context::new(&cloud.points)?;
    let weights = match mode {
        KernelMode::Area(a) => {
            let pass = count_pass(&ctx, &l_hat_plan(cloud.len(), cfg)?.subsets, a, true)?;
            pass.weights.map(|w| (w, pass.used))
        }
        KernelMode::Set(_) => None,
    };
    let stats = kernel_stats(&ctx, mode, weights, cfg)?;
    let ci = stats.ci(value, level);
    Ok((stats, ci))
}

fn kernel_stats(ctx: &Context<'_>, mode: KernelMode<'_>, weights: Option<(Vec<f64>, u64)>, cfg: &EstimatorConfig) -> Result<KernelStats> {
    let n = ctx.points.len();
    if n < 10 {
        return Err(Error::InsufficientPoints { needed: 10, got: n });
    }
    let per = (cfg.triple_budget / n).max(1);
    let h1 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(cfg.seed, "xi1", &[i as u64]);
            let mut sum = 0.0;
            let mut got = 0;
            let mut attempts = 0;
            while got < per {
                attempts += 1;
                if attempts > 100 * per {
                    return Err(Error::DegenerateInput(format!("no usable triangle through point {i}")));
                }
                let j = rng.gen_range(0..n);
                let k = rng.gen_range(0..n);
                if j == i || k == i || j == k {
                    continue;
                }
                let Some(t) = ctx.triangle(i, j, k) else {
                    continue;
                };
                sum += match mode {
                    KernelMode::Area(a) => ctx.count_kernel(&t, [i, j, k], a)?,
                    KernelMode::Set(s) => 1.0 - kernel_fraction_with(s, &t, cfg.kernel_points, &mut rng)?,
                };
                got += 1;
            }
            Ok((sum / per as f64).clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, xi1) = mean_var(&h1);
    let (order, projection_var) = match mode {
        KernelMode::Set(_) => (3, xi1),
        KernelMode::Area(a) => {
            let (w, used) = weights.ok_or_else(|| Error::InvalidConfig("interior weights missing".into()))?;
            // triangles sharing a vertex with x_i cannot contain it
            let scale = n as f64 / ((n - 3) as f64 * used.max(1) as f64);
            let g1: Vec<f64> = h1
                .iter()
                .zip(&w)
                .map(|(h, w)| 0.75 * h + 0.25 * (1.0 - a * w * scale))
                .collect();
            (4, mean_var(&g1).1)
        }
    };
    let stats = KernelStats {
        h1,
        mean,
        xi1,
        triangles_per_point: per,
        order,
        projection_var,
        std_error: order as f64 * (projection_var / n as f64).sqrt(),
    };
    Ok(stats)
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}
