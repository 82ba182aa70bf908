use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use noncvx::experiments::{
    run_coverage, run_curves, run_sweep, write_coverage_csv, write_curves_csv, write_sweep_aggregate_csv,
    write_sweep_raw_csv, CoverageReport, ExperimentSpec,
};
use noncvx::report::{to_canonical_json, SCHEMA_VERSION};
use noncvx::sets::{mc_l, mc_w, read_cloud_csv, write_cloud, PointCloud};
use noncvx::{estimate as run_estimator, EstimatorConfig, MeasureEstimate, MeasureKind, Target};

use crate::manifest::{manifest_path, FileDigest, RunManifest};
use crate::{EstimateArgs, ExperimentArgs, MeasureArgs, SampleArgs, SetArgs};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<noncvx::Error> for CliError {
    fn from(e: noncvx::Error) -> Self {
        use noncvx::Error::*;
        let code = match e {
            Io(_) | Parse(_) | EmptyMask => 3,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn require_target(set: &SetArgs) -> Result<Target> {
    set.target()
        .ok_or_else(|| CliError::usage("give a set with --family and --t, or --mask"))
}

fn record_target(manifest: &mut RunManifest, target: &Target) -> Result<()> {
    if let Target::Mask { mask, .. } = target {
        manifest
            .input(mask)
            .map_err(|e| CliError::io(format!("{}: {e}", mask.display())))?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8], manifest: &mut RunManifest) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    manifest.outputs.push(FileDigest::of_bytes(path, bytes));
    Ok(())
}

/// Writes the report to `out` or standard output, then the manifest.
fn emit(bytes: &[u8], out: Option<&Path>, explicit: Option<&Path>, mut manifest: RunManifest, start: Instant) -> Result<()> {
    match out {
        Some(path) => write_file(path, bytes, &mut manifest)?,
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io(format!("stdout: {e}")))?,
    }
    finish_manifest(manifest, manifest_path(explicit, out).as_deref(), start)
}

fn finish_manifest(mut manifest: RunManifest, path: Option<&Path>, start: Instant) -> Result<()> {
    manifest.elapsed_secs = start.elapsed().as_secs_f64();
    let text = to_canonical_json(&manifest)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct MeasureEntry {
    value: Option<f64>,
    std_error: Option<f64>,
    method: &'static str,
    error: Option<String>,
}

impl MeasureEntry {
    fn from(result: noncvx::Result<(f64, f64)>, method: &'static str) -> Self {
        match result {
            Ok((value, se)) => MeasureEntry {
                value: Some(value),
                std_error: Some(se),
                method,
                error: None,
            },
            Err(e) => MeasureEntry {
                value: None,
                std_error: None,
                method,
                error: Some(e.to_string()),
            },
        }
    }
}

pub fn measure(args: &MeasureArgs, explicit: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("measure");
    let target = require_target(&args.set)?;
    record_target(&mut manifest, &target)?;
    let loaded = target.load()?;
    let is_mask = matches!(target, Target::Mask { .. });
    let exact = loaded.exact_d_m();
    let (d, m) = match exact {
        Ok((d, m)) => (Ok((d, 0.0)), Ok((m, 0.0))),
        Err(e) => (Err(noncvx::Error::DegenerateInput(e.to_string())), Err(e)),
    };
    let set = loaded.set();
    let mut measures = BTreeMap::new();
    measures.insert("D", MeasureEntry::from(d, if is_mask { "pixel_lattice" } else { "exact" }));
    measures.insert("M", MeasureEntry::from(m, "exact"));
    measures.insert(
        "W",
        MeasureEntry::from(mc_w(set, args.pairs, args.seed).map(|v| (v.value, v.std_error)), "monte_carlo"),
    );
    measures.insert(
        "L",
        MeasureEntry::from(
            mc_l(set, args.triples, args.kernel_points, args.seed).map(|v| (v.value, v.std_error)),
            "monte_carlo",
        ),
    );
    let budgets = json!({
        "pairs": args.pairs,
        "triples": args.triples,
        "kernel_points": args.kernel_points,
    });
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "set": target,
        "label": target.label(),
        "seed": args.seed,
        "budgets": budgets,
        "measures": measures,
    });
    manifest.config = json!({ "set": target, "budgets": budgets });
    manifest.seed = Some(args.seed);
    emit(to_canonical_json(&report)?.as_bytes(), args.out.as_deref(), explicit, manifest, start)
}

#[derive(Serialize)]
struct EstimateEntry {
    measure: MeasureKind,
    estimate: Option<MeasureEstimate>,
    error: Option<String>,
}

pub fn estimate(args: &EstimateArgs, explicit: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("estimate");
    let defaults = EstimatorConfig::default();
    let cfg = EstimatorConfig {
        r: args.r.unwrap_or(defaults.r),
        eps: args.eps.unwrap_or(defaults.eps),
        m: args.m,
        triple_budget: args.triples.unwrap_or(defaults.triple_budget),
        quadruple_budget: args.quadruples,
        kernel_points: args.kernel_points.unwrap_or(defaults.kernel_points),
        area_override: args.area,
        level: args.level,
        seed: args.seed,
    };
    cfg.validate()?;
    if args.estimators.is_empty() {
        return Err(CliError::usage("no estimators requested"));
    }

    let (cloud, loaded, source) = match (&args.input, args.set.target()) {
        (Some(path), _) => {
            manifest
                .input(path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            (read_cloud_csv(path)?, None, json!({ "input": path }))
        }
        (None, Some(target)) => {
            let n = args
                .n
                .ok_or_else(|| CliError::usage("--n is required when sampling from --family or --mask"))?;
            record_target(&mut manifest, &target)?;
            let loaded = target.load()?;
            let cloud: PointCloud = loaded.sample(n, args.seed)?;
            (cloud, Some(loaded), json!({ "set": target, "label": target.label(), "n": n }))
        }
        (None, None) => return Err(CliError::usage("give --input, or a set with --n")),
    };

    let estimates: Vec<EstimateEntry> = args
        .estimators
        .iter()
        .map(|&kind| match run_estimator(kind, &cloud, loaded.as_ref().map(|l| l.set()), &cfg) {
            Ok(e) => EstimateEntry {
                measure: kind,
                estimate: Some(e),
                error: None,
            },
            Err(e) => EstimateEntry {
                measure: kind,
                estimate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "source": source,
        "n": cloud.len(),
        "config": cfg,
        "estimates": estimates,
    });
    manifest.config = json!({ "source": source, "estimators": args.estimators, "config": cfg });
    manifest.seed = Some(args.seed);
    emit(to_canonical_json(&report)?.as_bytes(), args.out.as_deref(), explicit, manifest, start)
}

pub fn sample(args: &SampleArgs, explicit: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("sample");
    let target = require_target(&args.set)?;
    record_target(&mut manifest, &target)?;
    let cloud = target.load()?.sample(args.n, args.seed)?;
    let mut bytes = Vec::new();
    write_cloud(&cloud, &mut bytes)?;
    manifest.config = json!({ "set": target, "n": args.n });
    manifest.seed = Some(args.seed);
    emit(&bytes, args.out.as_deref(), explicit, manifest, start)
}

pub fn experiment(args: &ExperimentArgs, explicit: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("experiment");
    let text = std::fs::read(&args.spec).map_err(|e| CliError::io(format!("{}: {e}", args.spec.display())))?;
    manifest.inputs.push(FileDigest::of_bytes(&args.spec, &text));
    let mut spec: ExperimentSpec = serde_json::from_slice(&text)
        .map_err(|e| CliError::usage(format!("{}: malformed spec: {e}", args.spec.display())))?;

    match &mut spec {
        ExperimentSpec::Sweep(s) => {
            if args.full_scale {
                *s = s.clone().full_scale();
            }
            if let Some(seed) = args.seed {
                s.base_seed = seed;
            }
        }
        ExperimentSpec::Curves(s) => {
            if let Some(seed) = args.seed {
                s.seed = seed;
            }
        }
        ExperimentSpec::Coverage(s) => {
            if let Some(seed) = args.seed {
                s.base_seed = seed;
            }
        }
    }
    if args.full_scale && !matches!(spec, ExperimentSpec::Sweep(_)) {
        return Err(CliError::usage("--full-scale applies to sweep specs only"));
    }
    spec.validate()
        .map_err(|e| CliError::usage(format!("{}: {e}", args.spec.display())))?;
    let targets: Vec<&Target> = match &spec {
        ExperimentSpec::Sweep(s) => s.targets.iter().collect(),
        ExperimentSpec::Coverage(s) => vec![&s.target],
        ExperimentSpec::Curves(_) => Vec::new(),
    };
    for t in targets {
        record_target(&mut manifest, t)?;
    }

    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(format!("{}: {e}", args.out.display())))?;
    let dir = &args.out;
    match &spec {
        ExperimentSpec::Sweep(s) => {
            let table = run_sweep(s)?;
            let mut raw = Vec::new();
            write_sweep_raw_csv(&table, &mut raw)?;
            write_file(&dir.join("raw.csv"), &raw, &mut manifest)?;
            let mut agg = Vec::new();
            write_sweep_aggregate_csv(&table, &mut agg)?;
            write_file(&dir.join("aggregate.csv"), &agg, &mut manifest)?;
            let timings: Vec<_> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "target": r.target,
                        "estimator": r.estimator,
                        "n": r.n,
                        "r": r.r,
                        "eps": r.eps,
                        "mean_runtime_secs": r.mean_runtime_secs,
                    })
                })
                .collect();
            manifest.timings = Some(json!(timings));
            manifest.seed = Some(s.base_seed);
        }
        ExperimentSpec::Curves(s) => {
            let table = run_curves(s)?;
            let mut out = Vec::new();
            write_curves_csv(&table, &mut out)?;
            write_file(&dir.join("curves.csv"), &out, &mut manifest)?;
            manifest.seed = Some(s.seed);
        }
        ExperimentSpec::Coverage(s) => {
            let report = run_coverage(s)?;
            let mut out = Vec::new();
            write_coverage_csv(&report, &mut out)?;
            write_file(&dir.join("coverage.csv"), &out, &mut manifest)?;
            let summary = CoverageReport {
                replicates: Vec::new(),
                ..report
            };
            let json = to_canonical_json(&json!({ "schema_version": SCHEMA_VERSION, "report": summary }))?;
            write_file(&dir.join("coverage.json"), json.as_bytes(), &mut manifest)?;
            manifest.seed = Some(s.base_seed);
        }
    }
    manifest.config = serde_json::to_value(&spec).map_err(|e| CliError::usage(e.to_string()))?;
    let path = explicit.map(Path::to_path_buf).unwrap_or_else(|| dir.join("manifest.json"));
    finish_manifest(manifest, Some(&path), start)
}
