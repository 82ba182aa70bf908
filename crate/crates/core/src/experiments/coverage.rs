use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_config, summarize, Target};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, MeasureKind};
use crate::rng::derive_seed;
use crate::sets::mc_l;

fn default_estimator() -> MeasureKind {
    MeasureKind::LHat
}

fn default_level() -> f64 {
    0.95
}

fn default_replicates() -> usize {
    200
}

fn default_truth_triples() -> usize {
    100_000
}

fn default_truth_kernel_points() -> usize {
    512
}

/// Empirical coverage of the normal-approximation interval for `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSpec {
    pub target: Target,
    #[serde(default = "default_estimator")]
    pub estimator: MeasureKind,
    pub n: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_config")]
    pub config: EstimatorConfig,
    /// Known value of `L`; estimated by `mc_l` when absent.
    #[serde(default)]
    pub truth: Option<f64>,
    #[serde(default = "default_truth_triples")]
    pub truth_triples: usize,
    #[serde(default = "default_truth_kernel_points")]
    pub truth_kernel_points: usize,
    #[serde(default)]
    pub base_seed: u64,
}

impl CoverageSpec {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.estimator, MeasureKind::LHat | MeasureKind::LKernel) {
            return Err(Error::InvalidConfig(format!(
                "coverage needs an interval-producing estimator (L_hat or L_kernel), got {}",
                self.estimator
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidConfig(format!("level {} outside (0, 1)", self.level)));
        }
        if self.n < 10 {
            return Err(Error::InsufficientPoints { needed: 10, got: self.n });
        }
        self.config.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReplicate {
    pub replicate: usize,
    pub seed: u64,
    pub value: Option<f64>,
    pub std_error: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub covered: Option<bool>,
    /// `(value - truth) / std_error`.
    pub z: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub target: String,
    pub estimator: MeasureKind,
    pub n: usize,
    pub level: f64,
    pub truth: f64,
    pub truth_std_error: Option<f64>,
    /// Set when the truth is 0 (convex target): no replicates are run.
    pub clt_inapplicable: bool,
    pub coverage: Option<f64>,
    pub replicates_ok: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub mean_std_error: Option<f64>,
    pub replicates: Vec<CoverageReplicate>,
}

pub fn run_coverage(spec: &CoverageSpec) -> Result<CoverageReport> {
    spec.validate()?;
    let set = spec.target.load()?;
    let (truth, truth_se) = match spec.truth {
        Some(t) => (t, None),
        None => {
            let seed = derive_seed(spec.base_seed, "coverage_truth", &[]);
            let v = mc_l(set.set(), spec.truth_triples, spec.truth_kernel_points, seed)?;
            (v.value, Some(v.std_error))
        }
    };
    let mut report = CoverageReport {
        target: spec.target.label(),
        estimator: spec.estimator,
        n: spec.n,
        level: spec.level,
        truth,
        truth_std_error: truth_se,
        clt_inapplicable: truth == 0.0,
        coverage: None,
        replicates_ok: 0,
        mean: None,
        sd: None,
        mean_std_error: None,
        replicates: Vec::new(),
    };
    if report.clt_inapplicable {
        return Ok(report);
    }

    report.replicates = (0..spec.replicates)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(spec.base_seed, "coverage_cloud", &[rep as u64]);
            let cfg = EstimatorConfig {
                level: Some(spec.level),
                seed: derive_seed(spec.base_seed, "coverage_estimator", &[rep as u64]),
                ..spec.config
            };
            let result = set
                .sample(spec.n, seed)
                .and_then(|cloud| estimate(spec.estimator, &cloud, Some(set.set()), &cfg));
            match result {
                Ok(e) => {
                    let ci = e.ci.expect("interval requested");
                    let se = e.std_error.filter(|&s| s > 0.0);
                    CoverageReplicate {
                        replicate: rep,
                        seed,
                        value: Some(e.value),
                        std_error: e.std_error,
                        ci_low: Some(ci.low),
                        ci_high: Some(ci.high),
                        covered: Some(ci.low <= truth && truth <= ci.high),
                        z: se.map(|s| (e.value - truth) / s),
                        error: None,
                    }
                }
                Err(e) => CoverageReplicate {
                    replicate: rep,
                    seed,
                    value: None,
                    std_error: None,
                    ci_low: None,
                    ci_high: None,
                    covered: None,
                    z: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let ok: Vec<&CoverageReplicate> = report.replicates.iter().filter(|r| r.value.is_some()).collect();
    report.replicates_ok = ok.len();
    if !ok.is_empty() {
        let covered = ok.iter().filter(|r| r.covered == Some(true)).count();
        report.coverage = Some(covered as f64 / ok.len() as f64);
        let values: Vec<f64> = ok.iter().filter_map(|r| r.value).collect();
        let summary = summarize(&values).expect("non-empty");
        report.mean = Some(summary.mean);
        report.sd = Some(summary.sd);
        report.mean_std_error = Some(ok.iter().filter_map(|r| r.std_error).sum::<f64>() / ok.len() as f64);
    }
    Ok(report)
}
