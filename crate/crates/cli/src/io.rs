//! CSV and JSON files read and written by the command line tool.
//!
//! Every written file starts with a provenance record: a `#` comment line in
//! CSV, a `provenance` object in JSON.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mfdepth::metrics::AssessmentRow;
use mfdepth::{Dataset, DepthReport, Method, MultiCurve};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::provenance::Provenance;

/// Column order of the benchmark table.
pub const METRICS_COLUMNS: [&str; 11] = [
    "model",
    "outlier_type",
    "sparseness_type",
    "p_curve_level",
    "method",
    "replicate",
    "ase_median",
    "ase_central",
    "capture",
    "spearman",
    "runtime_s",
];

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn line_of(err: &csv::Error) -> u64 {
    err.position().map_or(0, |p| p.line())
}

fn number(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| CliError::parse(path, line, format!("{what} '{field}' is not a number")))
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Parse an `id,t,y1..yp` file without checking the dataset invariants.
///
/// Rows are grouped by id in order of first appearance and sorted by time.
/// Malformed rows and repeated `(id, t)` pairs are errors.
pub fn read_csv(path: &Path) -> Result<Dataset> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| CliError::parse(path, line_of(&e), e.to_string()))?.clone();
    if headers.len() < 3 || !headers[0].eq_ignore_ascii_case("id") || !headers[1].eq_ignore_ascii_case("t") {
        return Err(CliError::parse(path, 1, "header must be id,t,y1[,y2..]"));
    }
    let p = headers.len() - 2;

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(f64, Vec<f64>, u64)>> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::parse(path, line_of(&e), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != p + 2 {
            return Err(CliError::parse(path, line, format!("expected {} fields, found {}", p + 2, record.len())));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(CliError::parse(path, line, "empty id"));
        }
        let t = number(path, line, &record[1], "time")?;
        let y = (0..p).map(|j| number(path, line, &record[j + 2], "value")).collect::<Result<Vec<_>>>()?;
        rows.entry(id.clone())
            .or_insert_with(|| {
                order.push(id);
                Vec::new()
            })
            .push((t, y, line));
    }

    let mut curves = Vec::with_capacity(order.len());
    for id in order {
        let mut obs = rows.remove(&id).unwrap_or_default();
        obs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = obs.windows(2).find(|w| w[0].0 == w[1].0) {
            let line = w[0].2.max(w[1].2);
            return Err(CliError::parse(path, line, format!("duplicate time {} for id '{id}'", w[0].0)));
        }
        let values = obs.iter().flat_map(|o| o.1.iter().copied()).collect();
        curves.push(MultiCurve::new(id, p, obs.into_iter().map(|o| o.0).collect(), values));
    }
    Ok(Dataset::new(p, curves))
}

/// [`read_csv`] followed by validation.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let ds = read_csv(path)?;
    let violations = ds.validate();
    match violations.first() {
        None => Ok(ds),
        Some(v) => Err(CliError::Invalid { count: violations.len(), first: v.to_string() }),
    }
}

fn write_comment(w: &mut impl Write, path: &Path, prov: &Provenance) -> Result<()> {
    writeln!(w, "# {}", prov.comment()).map_err(|e| CliError::io(path, e))
}

fn finish(mut wtr: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    wtr.flush().map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(path, std::io::Error::other(e))
}

pub fn save_dataset_csv(path: &Path, ds: &Dataset, prov: &Provenance) -> Result<()> {
    let mut out = create(path)?;
    write_comment(&mut out, path, prov)?;
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "t".to_string()];
    header.extend((1..=ds.p).map(|j| format!("y{j}")));
    wtr.write_record(&header).map_err(csv_err(path))?;
    for c in &ds.curves {
        for k in 0..c.len() {
            let mut row = vec![c.id.clone(), fmt_f64(c.times[k])];
            row.extend(c.y(k).iter().map(|&v| fmt_f64(v)));
            wtr.write_record(&row).map_err(csv_err(path))?;
        }
    }
    finish(wtr, path)
}

/// `id,method,depth,rank`, one row per curve in input order.
pub fn save_report_csv(path: &Path, report: &DepthReport, prov: &Provenance) -> Result<()> {
    let mut out = create(path)?;
    write_comment(&mut out, path, prov)?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["id", "method", "depth", "rank"]).map_err(csv_err(path))?;
    for i in 0..report.n() {
        wtr.write_record([
            report.ids[i].as_str(),
            report.method.name(),
            &fmt_f64(report.depths[i]),
            &fmt_f64(report.ranks[i]),
        ])
        .map_err(csv_err(path))?;
    }
    finish(wtr, path)
}

/// Read a report written by [`save_report_csv`]. Ranks are taken from the file.
pub fn load_report_csv(path: &Path) -> Result<DepthReport> {
    let mut rdr = reader(path)?;
    let (mut ids, mut depths, mut ranks) = (Vec::new(), Vec::new(), Vec::new());
    let mut method: Option<Method> = None;
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::parse(path, line_of(&e), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(CliError::parse(path, line, "expected id,method,depth,rank"));
        }
        let m: Method = record[1].parse().map_err(|e: mfdepth::Error| CliError::parse(path, line, e.to_string()))?;
        if method.is_some_and(|prev| prev != m) {
            return Err(CliError::parse(path, line, "mixed methods in one report"));
        }
        method = Some(m);
        ids.push(record[0].to_string());
        depths.push(number(path, line, &record[2], "depth")?);
        ranks.push(number(path, line, &record[3], "rank")?);
    }
    let method = method.ok_or_else(|| CliError::parse(path, 1, "report has no rows"))?;
    let mut report = DepthReport::new(method, None, ids, depths, Vec::new());
    report.ranks = ranks;
    Ok(report)
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with the provenance object merged into the top level.
pub fn save_json<T: Serialize>(path: &Path, body: &T, prov: &Provenance) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, &Wrapped { provenance: prov, body })
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

pub fn save_metrics_csv(path: &Path, rows: &[AssessmentRow], prov: &Provenance) -> Result<()> {
    let mut out = create(path)?;
    write_comment(&mut out, path, prov)?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(METRICS_COLUMNS).map_err(csv_err(path))?;
    for r in rows {
        wtr.write_record([
            r.model.to_string(),
            r.outlier_type.to_string(),
            r.sparseness_type.to_string(),
            r.p_curve_level.to_string(),
            r.method.name().to_string(),
            r.replicate.to_string(),
            opt(r.ase_median),
            opt(r.ase_central),
            opt(r.capture),
            opt(r.spearman),
            opt(r.runtime_s),
        ])
        .map_err(csv_err(path))?;
    }
    finish(wtr, path)
}

/// Read a metrics table back; empty cells become `None`.
pub fn load_metrics_csv(path: &Path) -> Result<Vec<AssessmentRow>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| CliError::parse(path, line_of(&e), e.to_string()))?.clone();
    if headers.iter().ne(METRICS_COLUMNS) {
        return Err(CliError::parse(path, 1, "unexpected metrics header"));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::parse(path, line_of(&e), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let core = |e: mfdepth::Error| CliError::parse(path, line, e.to_string());
        let cell = |k: usize| -> Result<Option<f64>> {
            match &record[k] {
                "" => Ok(None),
                s => number(path, line, s, METRICS_COLUMNS[k]).map(Some),
            }
        };
        rows.push(AssessmentRow {
            model: record[0].parse().map_err(core)?,
            outlier_type: record[1].parse().map_err(core)?,
            sparseness_type: record[2].parse().map_err(core)?,
            p_curve_level: record[3].parse().map_err(core)?,
            method: record[4].parse().map_err(core)?,
            replicate: record[5].parse().map_err(|_| CliError::parse(path, line, "replicate is not an integer"))?,
            ase_median: cell(6)?,
            ase_central: cell(7)?,
            capture: cell(8)?,
            spearman: cell(9)?,
            runtime_s: cell(10)?,
            error: None,
        });
    }
    Ok(rows)
}

/// `id,outlier` with `1` marking a planted outlier.
pub fn save_truth_csv(path: &Path, ds: &Dataset, outliers: &[usize], prov: &Provenance) -> Result<()> {
    let mut out = create(path)?;
    write_comment(&mut out, path, prov)?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["id", "outlier"]).map_err(csv_err(path))?;
    for (i, c) in ds.curves.iter().enumerate() {
        let flag = if outliers.contains(&i) { "1" } else { "0" };
        wtr.write_record([c.id.as_str(), flag]).map_err(csv_err(path))?;
    }
    finish(wtr, path)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}
