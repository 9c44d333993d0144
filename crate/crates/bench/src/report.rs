//! CSV tables and scatter plots of benchmark records.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::runner::{Algorithm, BenchRecord};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no records to report")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Debug, Serialize)]
struct Row {
    algo: Algorithm,
    nodes: usize,
    edges: usize,
    risky: usize,
    support_pairs: usize,
    robots: usize,
    tier: &'static str,
    seed: u64,
    cost: Option<f64>,
    true_opt: Option<f64>,
    naive_opt: Option<f64>,
    runtime_s: f64,
    timeout: bool,
    expanded: Option<u64>,
    cost_calcs: Option<u64>,
}

impl From<&BenchRecord> for Row {
    fn from(r: &BenchRecord) -> Self {
        let d = &r.instance;
        Row {
            algo: r.algorithm,
            nodes: d.node_count,
            edges: d.edge_count,
            risky: d.risky_count,
            support_pairs: d.support_pair_count,
            robots: d.robot_count,
            tier: d.connectivity_tier.as_str(),
            seed: d.seed,
            cost: r.cost.map(|c| c.to_f64()),
            true_opt: r.true_optimality,
            naive_opt: r.naive_optimality,
            runtime_s: r.runtime_s,
            timeout: r.timeout,
            expanded: r.counters.expanded,
            cost_calcs: r.counters.cost_calcs,
        }
    }
}

/// Renders the records as CSV text, header first.
pub fn to_csv(records: &[BenchRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(Row::from(r))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Optimality against log-scaled runtime, one colour per algorithm. Records
/// without a value are left out.
pub fn scatter_svg(records: &[BenchRecord], title: &str, metric: fn(&BenchRecord) -> Option<f64>) -> String {
    let (w, h, margin) = (640.0, 420.0, 60.0);
    let points: Vec<(Algorithm, f64, f64)> = records
        .iter()
        .filter_map(|r| Some((r.algorithm, r.runtime_s.max(1e-6).log10(), metric(r)?)))
        .collect();
    let (mut xmin, mut xmax) = points.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if points.is_empty() {
        (xmin, xmax) = (-6.0, 2.0);
    }
    xmin = xmin.floor();
    xmax = xmax.ceil().max(xmin + 1.0);
    let ymax = points.iter().map(|p| p.2).fold(1.0_f64, f64::max).ceil();
    let sx = |x: f64| margin + (x - xmin) / (xmax - xmin) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - y / ymax * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {top} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = margin,
        top = margin,
        b = h - margin,
        r = w - margin
    );
    for decade in (xmin as i32)..=(xmax as i32) {
        let x = sx(decade as f64);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle" font-size="11">1e{decade}</text>"#, h - margin + 16.0);
    }
    for tick in 0..=4 {
        let v = ymax * tick as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{v:.2}</text>"#, margin - 6.0, sy(v) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">runtime (s, log scale)</text>"#, w / 2.0, h - 20.0);

    let mut algos: Vec<Algorithm> = records.iter().map(|r| r.algorithm).collect();
    algos.sort_unstable();
    algos.dedup();
    for (i, algo) in algos.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for p in points.iter().filter(|p| p.0 == *algo) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}" fill-opacity="0.6"/>"#, sx(p.1), sy(p.2));
        }
        let ly = margin + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}"/>"#, w - margin - 110.0, ly - 9.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-size="12">{algo}</text>"#, w - margin - 95.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Files written by [`emit_reports`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, ReportError> {
    fs::write(&path, text).map_err(|source| ReportError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Writes `results.csv`, `true_optimality.svg` and `naive_optimality.svg`
/// into `dir`, creating it if needed.
pub fn emit_reports(records: &[BenchRecord], dir: &Path) -> Result<ReportFiles, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.to_path_buf(), source })?;
    let csv_path = dir.join("results.csv");
    let text = to_csv(records).map_err(|source| ReportError::Csv { path: csv_path.clone(), source })?;
    let csv = write(csv_path, &text)?;
    let plots = vec![
        write(dir.join("true_optimality.svg"), &scatter_svg(records, "True optimality vs. time", |r| r.true_optimality))?,
        write(dir.join("naive_optimality.svg"), &scatter_svg(records, "Naive optimality vs. time", |r| r.naive_optimality))?,
    ];
    Ok(ReportFiles { csv, plots })
}
