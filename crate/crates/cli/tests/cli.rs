use std::path::{Path, PathBuf};
use std::process::Command;

use mfdepth::simulate::{generate, ModelId, ModelSpec};
use mfdepth::{DepthConfig, DepthEngine, Method};
use mfdepth_cli::{io, run_from, CliError, Provenance};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mfdepth"))
}

fn s(p: &Path) -> String {
    p.display().to_string()
}

fn simulated(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("sim");
    let mut args = vec!["mfdepth", "simulate", "--model", "I", "--n", "40", "--t", "20", "--seed", "5", "-o"];
    let out_s = s(&out);
    args.push(&out_s);
    args.extend_from_slice(extra);
    run_from(args).unwrap();
    out.join("observed.csv")
}

#[test]
fn depth_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated(dir.path(), &[]);
    let out = dir.path().join("depth");
    let written = run_from(["mfdepth", "depth", "-i", &s(&input), "-m", "gmfid_wt,lmfed", "--seed", "2", "-o", &s(&out)]).unwrap();
    assert!(written.contains(&out.join("depth_gmfid_wt.csv")));
    assert!(written.contains(&out.join("depth_lmfed.json")));

    let ds = io::load_csv(&input).unwrap();
    let engine = DepthEngine::new(&ds, DepthConfig { seed: 2, ..Default::default() }).unwrap();
    for (m, file) in [(Method::GmfidWt, "depth_gmfid_wt.csv"), (Method::Lmfed, "depth_lmfed.csv")] {
        let want = engine.compute(m).unwrap();
        let got = io::load_report_csv(&out.join(file)).unwrap();
        assert_eq!(got.ids, want.ids);
        assert_eq!(got.depths, want.depths);
        assert_eq!(got.ranks, want.ranks);
    }
    let text = std::fs::read_to_string(out.join("depth_gmfid_wt.csv")).unwrap();
    assert!(text.starts_with("# mfdepth "));
    assert!(text.contains("seed=2"));
    assert_eq!(text.lines().nth(1), Some("id,method,depth,rank"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("depth_lmfed.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["seed"], 2);
    assert_eq!(json["report"]["method"], "LMFED");
}

#[test]
fn simulate_writes_truth() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path(), &["--outlier", "magnitude1", "--rate", "0.1", "--sparseness", "point", "--level", "medium"]);
    let truth = std::fs::read_to_string(dir.path().join("sim/truth.csv")).unwrap();
    let flagged = truth.lines().skip(2).filter(|l| l.ends_with(",1")).count();
    assert_eq!(flagged, 4);
    let observed = io::load_csv(&dir.path().join("sim/observed.csv")).unwrap();
    let clean = io::load_csv(&dir.path().join("sim/clean.csv")).unwrap();
    assert!(observed.total_obs() < clean.total_obs());
}

#[test]
fn metrics_table_has_declared_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    run_from([
        "mfdepth", "benchmark", "--models", "I", "--outliers", "magnitude1", "--sparseness", "point", "--levels", "dense",
        "--methods", "GMFID_wt,GMFED", "--reps", "2", "--n", "30", "--t", "12", "--seed", "7", "-o", &s(&out),
    ])
    .unwrap();
    let text = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let header: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(header, io::METRICS_COLUMNS);
    let rows = io::load_metrics_csv(&out.join("metrics.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.capture.is_some_and(|c| (0.0..=1.0).contains(&c))));
    let svg = std::fs::read_to_string(out.join("metrics.svg")).unwrap();
    assert!(svg.contains("config_hash=") && svg.matches("class=\"box\"").count() >= 8);
}

fn boxplot(dir: &Path, input: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let (i, o) = (s(input), s(&out));
    let mut args = vec!["mfdepth", "boxplot", "-i", &i, "-o", &o, "--raster", "20x15"];
    args.extend_from_slice(extra);
    run_from(args).unwrap();
    out
}

#[test]
fn boxplot_outputs_validate_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated(dir.path(), &["--outlier", "shape1", "--sparseness", "peak", "--level", "medium"]);
    let a = boxplot(dir.path(), &input, "a", &[]);
    let b = boxplot(dir.path(), &input, "b", &[]);
    for f in ["boxplot.json", "sparse_y1.svg", "sparse_y2.svg", "intensity_y1.svg", "intensity_y2.svg", "config.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }

    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/boxplot.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("boxplot.json")).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");

    let svg = std::fs::read_to_string(a.join("sparse_y1.svg")).unwrap();
    assert!(svg.contains("<!-- mfdepth ") && svg.contains("stroke-dasharray"));
    assert!(svg.contains("class=\"median\""));
}

#[test]
fn potential_outlier_switch() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated(dir.path(), &[]);
    let read = |out: &Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(out.join("boxplot.json")).unwrap()).unwrap()
    };
    let on = read(&boxplot(dir.path(), &input, "on", &["--potential-outliers", "on", "--intensity", "off"]));
    let off = read(&boxplot(dir.path(), &input, "off", &["--potential-outliers", "off", "--intensity", "off"]));
    assert!(!on["summary"]["outliers"]["potential_1"].as_array().unwrap().is_empty());
    assert!(off["summary"]["outliers"]["potential_1"].as_array().unwrap().is_empty());
    assert!(off["summary"]["outliers"]["potential_2"].as_array().unwrap().is_empty());
    assert!(off["summary"]["intensity"].as_array().unwrap().is_empty());
}

#[test]
fn svg_outlier_styles() {
    let ds = generate(&ModelSpec { model: ModelId::I, n: 30, t: 15, jitter: 0.0 }, 3).unwrap();
    let cfg = mfdepth::boxplot::BoxplotConfig { potential: false, intensity: false, ..Default::default() };
    let mut summary = mfdepth::boxplot::run_boxplot(&ds, &cfg).unwrap();
    let prov = Provenance::new("test", &cfg, 0);
    summary.outliers = Default::default();
    let svg = mfdepth_cli::svg::sparse_boxplot(&summary, &ds, 0, &prov);
    assert!(!svg.contains("class=\"outlier-"));

    summary.outliers.domain = vec![1];
    summary.outliers.functional = vec![2];
    summary.outliers.potential_1 = vec![3, 2];
    summary.outliers.potential_2 = vec![4];
    let svg = mfdepth_cli::svg::sparse_boxplot(&summary, &ds, 1, &prov);
    for class in ["outlier-domain", "outlier-functional", "outlier-potential-1", "outlier-potential-2", "median"] {
        assert!(svg.contains(&format!("class=\"{class}\"")), "{class}");
    }
    // curve 2 is drawn once, as a functional outlier
    assert_eq!(svg.matches("data-id=\"0003\"").count(), 1);
    assert_eq!(svg, mfdepth_cli::svg::sparse_boxplot(&summary, &ds, 1, &prov));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\nmethods = [\"GMFED\", \"LMFED\"]\n[depth]\nbeta = 0.3\n").unwrap();
    let cli = <mfdepth_cli::Cli as clap::Parser>::try_parse_from([
        "mfdepth", "--config", &s(&cfg), "depth", "-i", "x.csv", "--beta", "0.1",
    ])
    .unwrap();
    let eff = mfdepth_cli::effective_config(&cli).unwrap();
    assert_eq!(eff.seed, 3);
    assert_eq!(eff.depth.seed, 3);
    assert_eq!(eff.depth.beta, 0.1);
    assert_eq!(eff.methods, vec![Method::Gmfed, Method::Lmfed]);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["depth", "-i", &s(&dir.path().join("missing.csv"))]).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    let out = bin().args(["depth", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,t,y1\na,0,1\na,oops,2\n").unwrap();
    let out = bin().args(["validate", "-i", &s(&bad)]).output().unwrap();
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["line"], 3);

    let nan = dir.path().join("nan.csv");
    std::fs::write(&nan, "id,t,y1\na,0,1\na,1,NaN\n").unwrap();
    let out = bin().args(["validate", "-i", &s(&nan)]).output().unwrap();
    assert!(!out.status.success());
    let diag: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(diag["violations"][0]["rule"], "non_finite_value");
    assert!(matches!(run_from(["mfdepth", "validate", "-i", &s(&nan)]), Err(CliError::Invalid { .. })));

    let out = bin().env("MFDEPTH_THREADS", "zero").args(["validate", "-i", &s(&nan)]).output().unwrap();
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn binary_runs_single_threaded() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulated(dir.path(), &[]);
    let out = dir.path().join("d");
    let run = bin()
        .env("MFDEPTH_THREADS", "1")
        .args(["depth", "-i", &s(&input), "-m", "all", "-o", &s(&out), "--format", "csv"])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let listed = String::from_utf8(run.stdout).unwrap();
    assert_eq!(listed.lines().count(), 7);
}
