//! Sample-based estimators of D, M, W and L with standard errors.

mod basic;
mod lstat;
mod subsets;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sets::{AnalyticSet, PointCloud};

pub use basic::{estimate_d, estimate_m, estimate_w};
pub use lstat::{
    estimate_l_hat, estimate_l_indicator, estimate_l_kernel, xi1_and_ci, KernelMode, KernelStats,
    MIN_AREA_FRACTION,
};
pub use subsets::{binomial, plan_subsets, unrank, SubsetPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    /// r-convex hull radius for `M` and for the default area of `L`.
    pub r: f64,
    /// Ball-union radius of the support estimate used by `W`.
    pub eps: f64,
    /// Monte Carlo pairs for `W`; `None` means the sample size.
    pub m: Option<usize>,
    pub triple_budget: usize,
    /// Budget of 4-subsets for the indicator form of `L`; `None` means `triple_budget`.
    pub quadruple_budget: Option<usize>,
    /// Points per triangle when the kernel is integrated against a known set.
    pub kernel_points: usize,
    /// Known area of the set, used instead of the r-hull area.
    pub area_override: Option<f64>,
    /// Confidence level of the interval reported for `L`.
    pub level: Option<f64>,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            r: 0.1,
            eps: 0.05,
            m: None,
            triple_budget: 200_000,
            quadruple_budget: None,
            kernel_points: 256,
            area_override: None,
            level: None,
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("r", self.r)?;
        positive("eps", self.eps)?;
        if let Some(a) = self.area_override {
            positive("area_override", a)?;
        }
        if self.m == Some(0) {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.triple_budget == 0 || self.quadruple_budget == Some(0) {
            return Err(Error::InvalidConfig("subset budgets must be at least 1".into()));
        }
        if self.kernel_points == 0 {
            return Err(Error::InvalidConfig("kernel_points must be at least 1".into()));
        }
        if let Some(l) = self.level {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::ParamOutOfRange {
                    name: "level",
                    value: l,
                    min: 0.0,
                    max: 1.0,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    D,
    M,
    W,
    #[serde(rename = "L_hat")]
    LHat,
    #[serde(rename = "L_kernel")]
    LKernel,
    #[serde(rename = "L_indicator")]
    LIndicator,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::D,
        MeasureKind::M,
        MeasureKind::W,
        MeasureKind::LHat,
        MeasureKind::LKernel,
        MeasureKind::LIndicator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::D => "D",
            MeasureKind::M => "M",
            MeasureKind::W => "W",
            MeasureKind::LHat => "L_hat",
            MeasureKind::LKernel => "L_kernel",
            MeasureKind::LIndicator => "L_indicator",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "d" => Ok(MeasureKind::D),
            "m" => Ok(MeasureKind::M),
            "w" => Ok(MeasureKind::W),
            "l" | "l_hat" => Ok(MeasureKind::LHat),
            "l_kernel" => Ok(MeasureKind::LKernel),
            "l_indicator" => Ok(MeasureKind::LIndicator),
            _ => Err(Error::InvalidConfig(format!(
                "unknown estimator {s:?} (expected D, M, W, L_hat, L_kernel or L_indicator)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub level: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub hull_area: Option<f64>,
    pub rhull_area: Option<f64>,
    pub rhull_radius_too_small: Option<bool>,
    /// Area plugged into `L`.
    pub area_used: Option<f64>,
    pub lec_center: Option<Point>,
    pub lec_radius: Option<f64>,
    pub diameter: Option<f64>,
    pub proposals: Option<u64>,
    pub acceptance_rate: Option<f64>,
    /// Number of subsets of the U-statistic, saturated at `u64::MAX`.
    pub subsets_total: Option<u64>,
    pub subsets_used: Option<u64>,
    pub subsets_skipped: Option<u64>,
    pub complete: Option<bool>,
    pub xi1: Option<f64>,
    pub xi1_triangles_per_point: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub measure: MeasureKind,
    /// Estimate clamped to `[0, 1]`.
    pub value: f64,
    pub raw_value: f64,
    pub clamped: bool,
    pub std_error: Option<f64>,
    pub ci: Option<ConfidenceInterval>,
    pub n: usize,
    pub config: EstimatorConfig,
    pub diagnostics: Diagnostics,
}

impl MeasureEstimate {
    fn new(measure: MeasureKind, raw: f64, n: usize, config: &EstimatorConfig, diagnostics: Diagnostics) -> Self {
        let value = raw.clamp(0.0, 1.0);
        MeasureEstimate {
            measure,
            value,
            raw_value: raw,
            clamped: value != raw,
            std_error: None,
            ci: None,
            n,
            config: *config,
            diagnostics,
        }
    }
}

/// Runs one estimator. `set` is needed only by [`MeasureKind::LKernel`].
pub fn estimate(
    kind: MeasureKind,
    cloud: &PointCloud,
    set: Option<&dyn AnalyticSet>,
    cfg: &EstimatorConfig,
) -> Result<MeasureEstimate> {
    match kind {
        MeasureKind::D => estimate_d(cloud),
        MeasureKind::M => estimate_m(cloud, cfg),
        MeasureKind::W => estimate_w(cloud, cfg),
        MeasureKind::LHat => estimate_l_hat(cloud, cfg),
        MeasureKind::LIndicator => estimate_l_indicator(cloud, cfg),
        MeasureKind::LKernel => match set {
            Some(s) => estimate_l_kernel(cloud, s, cfg),
            None => Err(Error::InvalidConfig("L_kernel needs a known set".into())),
        },
    }
}
