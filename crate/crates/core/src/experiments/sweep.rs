use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_n_grid, default_config, summarize, LoadedTarget, Target};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, MeasureKind};
use crate::rng::derive_seed;

pub const DEFAULT_CELL_TIMEOUT: f64 = 120.0;

fn default_timeout() -> f64 {
    DEFAULT_CELL_TIMEOUT
}

fn default_replicates() -> usize {
    50
}

fn default_n_grid() -> Vec<usize> {
    DESK_N_GRID.to_vec()
}

/// Default sample sizes.
pub const DESK_N_GRID: [usize; 3] = [250, 1000, 4000];
/// Sample sizes and replicate count of the full-scale study.
pub const FULL_N_GRID: [usize; 4] = [1000, 2500, 5000, 10000];
pub const FULL_REPLICATES: usize = 200;

/// A replicated sweep over targets, estimators, sample sizes and the
/// `r_grid × eps_grid` parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub targets: Vec<Target>,
    pub estimators: Vec<MeasureKind>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_config")]
    pub config: EstimatorConfig,
    /// Values of `r`; defaults to `config.r`.
    #[serde(default)]
    pub r_grid: Option<Vec<f64>>,
    /// Values of `eps`; defaults to `config.eps`.
    #[serde(default)]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub base_seed: u64,
    /// Wall-clock budget per cell in seconds.
    #[serde(default = "default_timeout")]
    pub cell_timeout_secs: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::InvalidConfig("no targets".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators".into()));
        }
        check_n_grid(&self.n_grid)?;
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if !(self.cell_timeout_secs > 0.0) {
            return Err(Error::InvalidConfig("cell_timeout_secs must be positive".into()));
        }
        for (r, eps) in self.params() {
            EstimatorConfig { r, eps, ..self.config }.validate()?;
        }
        Ok(())
    }

    /// Switches to the full-scale sample sizes and replicate count.
    pub fn full_scale(mut self) -> Self {
        self.n_grid = FULL_N_GRID.to_vec();
        self.replicates = FULL_REPLICATES;
        self
    }

    /// The `(r, eps)` pairs, `r` varying slowest.
    pub fn params(&self) -> Vec<(f64, f64)> {
        let rs = self.r_grid.clone().unwrap_or_else(|| vec![self.config.r]);
        let es = self.eps_grid.clone().unwrap_or_else(|| vec![self.config.eps]);
        rs.iter().flat_map(|&r| es.iter().map(move |&e| (r, e))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Some replicates failed.
    Partial,
    Error,
    Timeout,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Partial => "partial",
            CellStatus::Error => "error",
            CellStatus::Timeout => "timeout",
        }
    }
}

/// One estimator run on one replicate cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub target: String,
    pub estimator: MeasureKind,
    pub n: usize,
    pub r: f64,
    pub eps: f64,
    pub replicate: usize,
    /// Seed of the sampled cloud.
    pub seed: u64,
    pub value: Option<f64>,
    pub raw_value: Option<f64>,
    pub clamped: Option<bool>,
    pub std_error: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub status: CellStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub target: String,
    pub estimator: MeasureKind,
    pub n: usize,
    pub r: f64,
    pub eps: f64,
    pub replicates_ok: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub q05: Option<f64>,
    pub q95: Option<f64>,
    pub clamp_rate: Option<f64>,
    pub truth: Option<f64>,
    pub abs_error: Option<f64>,
    pub status: CellStatus,
    /// Wall-clock seconds per replicate; kept out of the CSV outputs.
    pub mean_runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub rows: Vec<AggregateRow>,
    pub raw: Vec<RawRecord>,
}

/// Runs every cell of the sweep. Failures inside a cell are recorded, not
/// returned; only an invalid spec or an unloadable target is an error.
pub fn run_sweep(spec: &SweepSpec) -> Result<ExperimentTable> {
    spec.validate()?;
    let loaded = spec.targets.iter().map(Target::load).collect::<Result<Vec<_>>>()?;
    let params = spec.params();
    let budget = Duration::from_secs_f64(spec.cell_timeout_secs);
    let mut table = ExperimentTable { rows: Vec::new(), raw: Vec::new() };

    for (ti, (target, set)) in spec.targets.iter().zip(&loaded).enumerate() {
        let label = target.label();
        let exact = set.exact_d_m().ok();
        for &n in &spec.n_grid {
            let clouds: Vec<_> = (0..spec.replicates)
                .into_par_iter()
                .map(|rep| {
                    let seed = derive_seed(spec.base_seed, "cloud", &[ti as u64, n as u64, rep as u64]);
                    (seed, set.sample(n, seed))
                })
                .collect();
            for &kind in &spec.estimators {
                let truth = match (kind, exact) {
                    (MeasureKind::D, Some((d, _))) => Some(d),
                    (MeasureKind::M, Some((_, m))) => Some(m),
                    _ => None,
                };
                for (pi, &(r, eps)) in params.iter().enumerate() {
                    let cell = Cell { spec, set, label: &label, kind, n, r, eps, ti, pi, budget };
                    let (row, raw) = cell.run(&clouds, truth);
                    table.rows.push(row);
                    table.raw.extend(raw);
                }
            }
        }
    }
    Ok(table)
}

struct Cell<'a> {
    spec: &'a SweepSpec,
    set: &'a LoadedTarget,
    label: &'a str,
    kind: MeasureKind,
    n: usize,
    r: f64,
    eps: f64,
    ti: usize,
    pi: usize,
    budget: Duration,
}

impl Cell<'_> {
    fn run(
        &self,
        clouds: &[(u64, Result<crate::sets::PointCloud>)],
        truth: Option<f64>,
    ) -> (AggregateRow, Vec<RawRecord>) {
        let start = Instant::now();
        let kind_index = MeasureKind::ALL.iter().position(|&k| k == self.kind).unwrap() as u64;
        let raw: Vec<RawRecord> = clouds
            .par_iter()
            .enumerate()
            .map(|(rep, (seed, cloud))| {
                let mut rec = RawRecord {
                    target: self.label.to_string(),
                    estimator: self.kind,
                    n: self.n,
                    r: self.r,
                    eps: self.eps,
                    replicate: rep,
                    seed: *seed,
                    value: None,
                    raw_value: None,
                    clamped: None,
                    std_error: None,
                    ci_low: None,
                    ci_high: None,
                    status: CellStatus::Ok,
                    error: None,
                };
                if start.elapsed() > self.budget {
                    rec.status = CellStatus::Timeout;
                    return rec;
                }
                let cfg = EstimatorConfig {
                    r: self.r,
                    eps: self.eps,
                    seed: derive_seed(
                        self.spec.base_seed,
                        "estimator",
                        &[self.ti as u64, self.n as u64, rep as u64, kind_index, self.pi as u64],
                    ),
                    ..self.spec.config
                };
                let result = cloud
                    .as_ref()
                    .map_err(|e| e.to_string())
                    .and_then(|c| estimate(self.kind, c, Some(self.set.set()), &cfg).map_err(|e| e.to_string()));
                match result {
                    Ok(e) => {
                        rec.value = Some(e.value);
                        rec.raw_value = Some(e.raw_value);
                        rec.clamped = Some(e.clamped);
                        rec.std_error = e.std_error;
                        rec.ci_low = e.ci.map(|c| c.low);
                        rec.ci_high = e.ci.map(|c| c.high);
                    }
                    Err(msg) => {
                        rec.status = CellStatus::Error;
                        rec.error = Some(msg);
                    }
                }
                rec
            })
            .collect();

        let ok: Vec<&RawRecord> = raw.iter().filter(|r| r.status == CellStatus::Ok).collect();
        let values: Vec<f64> = ok.iter().filter_map(|r| r.value).collect();
        let summary = summarize(&values);
        let status = if raw.iter().any(|r| r.status == CellStatus::Timeout) {
            CellStatus::Timeout
        } else if ok.is_empty() {
            CellStatus::Error
        } else if ok.len() < raw.len() {
            CellStatus::Partial
        } else {
            CellStatus::Ok
        };
        let mean = summary.map(|s| s.mean);
        let row = AggregateRow {
            target: self.label.to_string(),
            estimator: self.kind,
            n: self.n,
            r: self.r,
            eps: self.eps,
            replicates_ok: ok.len(),
            mean,
            sd: summary.map(|s| s.sd),
            q05: summary.map(|s| s.q05),
            q95: summary.map(|s| s.q95),
            clamp_rate: (!ok.is_empty())
                .then(|| ok.iter().filter(|r| r.clamped == Some(true)).count() as f64 / ok.len() as f64),
            truth,
            abs_error: mean.zip(truth).map(|(m, t)| (m - t).abs()),
            status,
            mean_runtime_secs: start.elapsed().as_secs_f64() / raw.len() as f64,
        };
        (row, raw)
    }
}
