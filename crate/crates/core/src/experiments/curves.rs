use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sets::{analytic_d, analytic_m, mc_l, mc_w, Family, FamilyParam, FamilySet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveMeasure {
    D,
    M,
    W,
    L,
}

impl CurveMeasure {
    pub const ALL: [CurveMeasure; 4] = [CurveMeasure::D, CurveMeasure::M, CurveMeasure::W, CurveMeasure::L];

    pub fn name(self) -> &'static str {
        match self {
            CurveMeasure::D => "D",
            CurveMeasure::M => "M",
            CurveMeasure::W => "W",
            CurveMeasure::L => "L",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFamily {
    pub family: Family,
    pub t: Vec<f64>,
}

fn all_measures() -> Vec<CurveMeasure> {
    CurveMeasure::ALL.to_vec()
}

fn default_pairs() -> usize {
    5000
}

fn default_kernel_points() -> usize {
    256
}

/// Population values along the `A_i(t)` families: exact `D` and `M`,
/// Monte Carlo `W` and `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub families: Vec<CurveFamily>,
    #[serde(default = "all_measures")]
    pub measures: Vec<CurveMeasure>,
    #[serde(default = "default_pairs")]
    pub w_pairs: usize,
    #[serde(default = "default_pairs")]
    pub l_triples: usize,
    #[serde(default = "default_kernel_points")]
    pub kernel_points: usize,
    #[serde(default)]
    pub seed: u64,
}

impl CurveSpec {
    /// The figure's grid: 21 equally spaced values across each family's range.
    pub fn figure_grid(seed: u64) -> Self {
        CurveSpec {
            families: Family::ALL
                .iter()
                .map(|&family| {
                    let (lo, hi) = family.range();
                    CurveFamily {
                        family,
                        t: (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).collect(),
                    }
                })
                .collect(),
            measures: all_measures(),
            w_pairs: default_pairs(),
            l_triples: default_pairs(),
            kernel_points: default_kernel_points(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.iter().all(|f| f.t.is_empty()) {
            return Err(Error::InvalidConfig("no t values".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::InvalidConfig("no measures".into()));
        }
        if self.w_pairs == 0 || self.l_triples == 0 || self.kernel_points == 0 {
            return Err(Error::InvalidConfig("Monte Carlo budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub family: Family,
    pub t: f64,
    pub measure: CurveMeasure,
    pub value: Option<f64>,
    /// Monte Carlo standard error; zero for exact values.
    pub std_error: Option<f64>,
    pub method: String,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn value(&self, family: Family, t: f64, measure: CurveMeasure) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.family == family && r.t == t && r.measure == measure)
            .and_then(|r| r.value)
    }
}

pub fn run_curves(spec: &CurveSpec) -> Result<CurveTable> {
    spec.validate()?;
    let points: Vec<(usize, Family, usize, f64)> = spec
        .families
        .iter()
        .enumerate()
        .flat_map(|(fi, f)| f.t.iter().enumerate().map(move |(ti, &t)| (fi, f.family, ti, t)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(fi, family, ti, t)| {
            let seed = derive_seed(spec.seed, "curve", &[fi as u64, ti as u64]);
            spec.measures
                .iter()
                .map(|&measure| curve_row(spec, family, t, measure, seed))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    Ok(CurveTable { rows })
}

fn curve_row(spec: &CurveSpec, family: Family, t: f64, measure: CurveMeasure, seed: u64) -> CurveRow {
    let computed = FamilyParam::new(family, t).and_then(|p| -> Result<(f64, f64)> {
        Ok(match measure {
            CurveMeasure::D => (analytic_d(p)?, 0.0),
            CurveMeasure::M => (analytic_m(p)?, 0.0),
            CurveMeasure::W => {
                let v = mc_w(&FamilySet::new(p)?, spec.w_pairs, seed)?;
                (v.value, v.std_error)
            }
            CurveMeasure::L => {
                let v = mc_l(&FamilySet::new(p)?, spec.l_triples, spec.kernel_points, seed)?;
                (v.value, v.std_error)
            }
        })
    });
    let method = match measure {
        CurveMeasure::D | CurveMeasure::M => "exact",
        CurveMeasure::W | CurveMeasure::L => "monte_carlo",
    };
    match computed {
        Ok((value, se)) => CurveRow {
            family,
            t,
            measure,
            value: Some(value),
            std_error: Some(se),
            method: method.into(),
            error: None,
        },
        Err(e) => CurveRow {
            family,
            t,
            measure,
            value: None,
            std_error: None,
            method: method.into(),
            error: Some(e.to_string()),
        },
    }
}
