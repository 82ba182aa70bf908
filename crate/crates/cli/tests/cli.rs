use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use noncvx::sets::{write_pgm, MaskSet};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_noncvx"));
    c.env_remove("NONCVX_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

/// A 120×120 mask shaped like a thick "C".
fn c_mask(dir: &Path) -> PathBuf {
    let (w, h) = (120, 120);
    let bits = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64 - 60.0, (i / w) as f64 - 60.0);
            let rr = x * x + y * y;
            rr < 50.0 * 50.0 && rr > 25.0 * 25.0 && !(x > 0.0 && y.abs() < 12.0)
        })
        .collect();
    let path = dir.join("maskA.pgm");
    write_pgm(&MaskSet::new(w, h, bits, 1.0).unwrap(), &path).unwrap();
    path
}

#[test]
fn measure_family_member() {
    let v = json_of(&run(&["measure", "--family", "A1", "--t", "0.5"]));
    let m = &v["measures"];
    assert!((m["D"]["value"].as_f64().unwrap() - 0.5 / 8f64.sqrt()).abs() < 1e-12);
    assert!((m["M"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    for k in ["W", "L"] {
        assert!(m[k]["std_error"].as_f64().unwrap() > 0.0);
        assert_eq!(m[k]["method"], "monte_carlo");
    }
    assert_eq!(v["schema_version"], 1);

    let v = json_of(&run(&["measure", "--family", "A2", "--t", "0"]));
    for k in ["D", "M", "W", "L"] {
        assert_eq!(v["measures"][k]["value"].as_f64(), Some(0.0), "{k}");
    }
}

#[test]
fn measure_full_mask_is_convex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full_white.pgm");
    write_pgm(&MaskSet::new(30, 20, vec![true; 600], 1.0).unwrap(), &path).unwrap();
    let v = json_of(&run(&["measure", "--mask", path.to_str().unwrap()]));
    for k in ["D", "M", "W", "L"] {
        assert!(v["measures"][k]["value"].as_f64().unwrap() <= 0.02, "{k}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["measure", "--family", "A2", "--t", "3"]).status.code(), Some(2));
    assert_eq!(run(&["measure"]).status.code(), Some(2));
    assert_eq!(run(&["measure", "--family", "A9", "--t", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["measure", "--mask", "/no/such/mask.pgm"]).status.code(), Some(3));
    assert_eq!(run(&["estimate", "--input", "/no/such/cloud.csv"]).status.code(), Some(3));
    assert_eq!(run(&["estimate", "--family", "A1", "--t", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--threads", "0", "sample", "--family", "A1", "--t", "0.5", "--n", "5"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.pgm");
    std::fs::write(&garbage, b"not an image").unwrap();
    assert_eq!(run(&["measure", "--mask", garbage.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn estimate_square_corners() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corners.csv");
    std::fs::write(&path, "x,y\n0,0\n1,0\n1,1\n0,1\n").unwrap();
    let v = json_of(&run(&["estimate", "--input", path.to_str().unwrap(), "--estimators", "D"]));
    let est = &v["estimates"][0];
    assert_eq!(est["measure"], "D");
    assert!((est["estimate"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    // a cloud from a file has no known set, so L_kernel fails inline
    let v = json_of(&run(&[
        "estimate", "--input", path.to_str().unwrap(), "--estimators", "D,L_kernel",
    ]));
    assert!(v["estimates"][1]["error"].as_str().unwrap().contains("known set"));
}

#[test]
fn estimate_on_mask_is_valid_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mask = c_mask(dir.path());
    let args = [
        "estimate", "--mask", mask.to_str().unwrap(), "--n", "2500", "--r", "7.5", "--eps", "5", "--seed", "1",
        "--level", "0.95",
    ];
    let first = run(&args);
    let v = json_of(&first);
    let estimates = v["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 4);
    for e in estimates {
        let x = e["estimate"]["value"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&x), "{e}");
    }
    assert!(estimates[3]["estimate"]["ci"]["low"].is_number());
    assert_eq!(first.stdout, run(&args).stdout);
    let one = bin().args(["--threads", "1"]).args(args).output().unwrap();
    let eight = bin().env("NONCVX_THREADS", "8").args(args).output().unwrap();
    assert_eq!(first.stdout, one.stdout);
    assert_eq!(first.stdout, eight.stdout);
}

#[test]
fn manifest_records_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mask = c_mask(dir.path());
    let out = dir.path().join("report.json");
    let status = run(&["measure", "--mask", mask.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "measure");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"][0]["path"], out.to_str().unwrap());
    assert!(manifest["timestamp"].as_str().unwrap().ends_with('Z'));
    assert_eq!(manifest["seed"], 0);

    // without --out the manifest goes to standard error
    let o = run(&["sample", "--family", "A1", "--t", "0.5", "--n", "3"]);
    let m: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(m["command"], "sample");
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
}

#[test]
fn sample_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let args = ["sample", "--family", "A1", "--t", "0.5", "--n", "2000", "--seed", "4", "--out", cloud.to_str().unwrap()];
    assert!(run(&args).status.success());
    let bytes = std::fs::read(&cloud).unwrap();
    assert!(!bytes.contains(&b'\r'));
    assert!(run(&args).status.success());
    assert_eq!(bytes, std::fs::read(&cloud).unwrap());
    let v = json_of(&run(&["estimate", "--input", cloud.to_str().unwrap(), "--estimators", "D"]));
    assert_eq!(v["n"], 2000);
    assert!((v["estimates"][0]["estimate"]["value"].as_f64().unwrap() - 0.1768).abs() < 0.03);
}

#[test]
fn bundled_curves_spec_shows_the_plateau() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["experiment", specs_dir().join("curves.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut plateau = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let t: f64 = f[1].parse().unwrap();
        if f[0] == "A3" && f[2] == "W" && t >= 0.5 {
            let w: f64 = f[3].parse().unwrap();
            assert!((w - 0.75).abs() <= 0.02, "t = {t}: {w}");
            plateau += 1;
        }
    }
    assert_eq!(plateau, 11);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn bundled_convergence_spec_errors_shrink() {
    let spec = specs_dir().join("convergence.json");
    let mut errors: std::collections::BTreeMap<(String, String), Vec<Vec<f64>>> = Default::default();
    for seed in ["1", "2", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["experiment", spec.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", seed]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let key = (f[col("target")].to_string(), f[col("estimator")].to_string());
            let k = ["250", "1000", "4000"].iter().position(|n| *n == f[col("n")]).unwrap();
            let entry = errors.entry(key).or_insert_with(|| vec![Vec::new(); 3]);
            entry[k].push(f[col("abs_error")].parse().unwrap());
        }
    }
    assert_eq!(errors.len(), 6);
    for (key, per_n) in errors {
        let med: Vec<f64> = per_n
            .into_iter()
            .map(|mut v| {
                v.sort_by(f64::total_cmp);
                v[1]
            })
            .collect();
        assert!(med.windows(2).all(|w| w[1] <= w[0]), "{key:?}: {med:?}");
    }
}

#[test]
fn experiment_spec_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"kind": "sweep", "targets": [], "estimators": ["D"]}"#).unwrap();
    let out = run(&["experiment", empty.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no targets") && err.contains("usage"), "{err}");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["experiment", bad.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["experiment", "/no/such/spec.json", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_outputs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"kind": "sweep", "targets": [{"family": "A1", "t": 0.5}], "estimators": ["D", "M", "W", "L_hat"],
            "n_grid": [200, 400], "replicates": 3, "config": {"triple_budget": 5000}, "base_seed": 5}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "8", "8"] {
        let out = dir.path().join(format!("run{}", outputs.len()));
        let o = run(&["--threads", threads, "experiment", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push((
            std::fs::read(out.join("raw.csv")).unwrap(),
            std::fs::read(out.join("aggregate.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}
