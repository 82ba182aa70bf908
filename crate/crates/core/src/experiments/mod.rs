//! Replicated simulation studies: estimator sweeps, population curves and
//! interval coverage.

mod coverage;
mod curves;
mod output;
mod sweep;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::sets::{
    analytic_d, analytic_m, load_mask, mask_measures, sample_from_mask, sample_uniform, AnalyticSet, Family,
    FamilyParam, FamilySet, MaskSet, PointCloud,
};

pub use coverage::{run_coverage, CoverageReplicate, CoverageReport, CoverageSpec};
pub use curves::{run_curves, CurveFamily, CurveMeasure, CurveRow, CurveSpec, CurveTable};
pub use output::{write_coverage_csv, write_curves_csv, write_sweep_aggregate_csv, write_sweep_raw_csv};
pub use sweep::{
    run_sweep, AggregateRow, CellStatus, ExperimentTable, RawRecord, SweepSpec, DEFAULT_CELL_TIMEOUT, DESK_N_GRID,
    FULL_N_GRID, FULL_REPLICATES,
};

/// A set to sample from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Target {
    Family {
        family: Family,
        t: f64,
    },
    Mask {
        mask: PathBuf,
        #[serde(default = "unit_pixel")]
        pixel_size: f64,
    },
}

fn unit_pixel() -> f64 {
    1.0
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Family { family, t } => format!("{family}({t})"),
            Target::Mask { mask, .. } => mask.display().to_string(),
        }
    }

    pub fn load(&self) -> Result<LoadedTarget> {
        Ok(match self {
            Target::Family { family, t } => {
                LoadedTarget::Family(FamilySet::new(FamilyParam::new(*family, *t)?)?)
            }
            Target::Mask { mask, pixel_size } => LoadedTarget::Mask(Arc::new(
                load_mask(mask, *pixel_size)?.with_label(mask.display().to_string()),
            )),
        })
    }
}

/// A target ready for sampling.
#[derive(Debug, Clone)]
pub enum LoadedTarget {
    Family(FamilySet),
    Mask(Arc<MaskSet>),
}

impl LoadedTarget {
    pub fn set(&self) -> &dyn AnalyticSet {
        match self {
            LoadedTarget::Family(s) => s,
            LoadedTarget::Mask(m) => m.as_ref(),
        }
    }

    /// Uniform sample on a family member; pixel-then-jitter on a mask.
    pub fn sample(&self, n: usize, seed: u64) -> Result<PointCloud> {
        match self {
            LoadedTarget::Family(s) => sample_uniform(s, n, seed),
            LoadedTarget::Mask(m) => sample_from_mask(m, n, seed),
        }
    }

    /// Exact `(D, M)` when available: closed forms for the families, pixel
    /// geometry for masks.
    pub fn exact_d_m(&self) -> Result<(f64, f64)> {
        match self {
            LoadedTarget::Family(s) => Ok((analytic_d(s.param())?, analytic_m(s.param())?)),
            LoadedTarget::Mask(m) => {
                let mm = mask_measures(m)?;
                Ok((mm.d, mm.m))
            }
        }
    }
}

/// Any experiment that `noncvx experiment` can run, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSpec {
    Sweep(SweepSpec),
    Curves(CurveSpec),
    Coverage(CoverageSpec),
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentSpec::Sweep(s) => s.validate(),
            ExperimentSpec::Curves(s) => s.validate(),
            ExperimentSpec::Coverage(s) => s.validate(),
        }
    }
}

pub(crate) fn check_n_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::InvalidConfig("n_grid is empty".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("n_grid must be strictly ascending".into()));
    }
    if n_grid[0] == 0 {
        return Err(Error::InvalidConfig("sample sizes must be positive".into()));
    }
    Ok(())
}

pub(crate) fn default_config() -> EstimatorConfig {
    EstimatorConfig::default()
}

/// Mean, unbiased standard deviation and the 5% / 95% quantiles
/// (linear interpolation between order statistics).
pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Some(Summary {
        mean,
        sd,
        q05: q(0.05),
        q95: q(0.95),
        median: q(0.5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q95: f64,
    pub median: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_known_values() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!((s.sd - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((s.q05 - 1.2).abs() < 1e-12 && (s.q95 - 4.8).abs() < 1e-12);
        assert_eq!(s.median, 3.0);
        assert_eq!(summarize(&[7.0]).unwrap().sd, 0.0);
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn target_json_forms() {
        let f: Target = serde_json::from_str(r#"{"family": "A1", "t": 0.5}"#).unwrap();
        assert_eq!(f, Target::Family { family: Family::A1, t: 0.5 });
        let m: Target = serde_json::from_str(r#"{"mask": "b.pgm"}"#).unwrap();
        assert_eq!(m, Target::Mask { mask: "b.pgm".into(), pixel_size: 1.0 });
        assert_eq!(f.label(), "A1(0.5)");
    }

    #[test]
    fn n_grid_rules() {
        assert!(check_n_grid(&[10, 20]).is_ok());
        assert!(check_n_grid(&[]).is_err());
        assert!(check_n_grid(&[20, 10]).is_err());
    }
}
