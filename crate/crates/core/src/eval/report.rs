//! CSV and summary output of an evaluation run.
//!
//! | file | columns |
//! |------|---------|
//! | `scores.csv` | `source_id,label,is_anomaly,rank,g,f,f_method` |
//! | `error_curve_f.csv`, `error_curve_g.csv` | `threshold,error_rate` |
//! | `heatmap_f.csv`, `heatmap_g.csv` | `x,y,value` |
//! | `summary.txt` | `key: value` lines |
//!
//! Undefined values (`f` at the training centroid) are written as `NA`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use super::bench::Evaluation;
use super::heatmap::HeatmapGrid;
use super::score::ScoredSample;
use super::sweep::ErrorCurve;
use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const SCORES_FILE: &str = "scores.csv";
pub const CURVE_F_FILE: &str = "error_curve_f.csv";
pub const CURVE_G_FILE: &str = "error_curve_g.csv";
pub const HEATMAP_F_FILE: &str = "heatmap_f.csv";
pub const HEATMAP_G_FILE: &str = "heatmap_g.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone)]
pub struct Report<'a> {
    pub evaluation: &'a Evaluation,
    pub heatmap: &'a HeatmapGrid,
    /// Extra `summary.txt` lines such as the method and seeds.
    pub metadata: Vec<(String, String)>,
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        v.to_string()
    }
}

fn scores_csv(scores: &[ScoredSample]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record([
        "source_id",
        "label",
        "is_anomaly",
        "rank",
        "g",
        "f",
        "f_method",
    ]);
    for s in scores {
        let _ = w.write_record([
            s.source_id.clone(),
            s.label.as_str().to_owned(),
            s.is_anomaly().to_string(),
            s.rank.to_string(),
            num(s.g),
            s.f.map_or("NA".into(), num),
            s.f_method.to_owned(),
        ]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

fn curve_csv(curve: &ErrorCurve) -> String {
    let mut out = String::from("threshold,error_rate\n");
    for (t, e) in curve.thresholds.iter().zip(&curve.error_rates) {
        let _ = writeln!(out, "{t},{e}");
    }
    out
}

fn grid_csv(grid: &HeatmapGrid, values: &DMatrix<f64>) -> String {
    let mut out = String::from("x,y,value\n");
    for (i, x) in grid.xs.iter().enumerate() {
        for (j, y) in grid.ys.iter().enumerate() {
            let _ = writeln!(out, "{x},{y},{}", num(values[(i, j)]));
        }
    }
    out
}

fn summary_text(report: &Report<'_>) -> String {
    let e = report.evaluation;
    let mut lines: Vec<(String, String)> = vec![
        ("samples".into(), e.scores.len().to_string()),
        (
            "anomalies".into(),
            e.scores
                .iter()
                .filter(|s| s.is_anomaly())
                .count()
                .to_string(),
        ),
        ("min_error_f".into(), e.curve_f.min_error.to_string()),
        (
            "argmin_threshold_f".into(),
            e.curve_f.argmin_threshold.to_string(),
        ),
        ("min_error_g".into(), e.curve_g.min_error.to_string()),
        (
            "argmin_threshold_g".into(),
            e.curve_g.argmin_threshold.to_string(),
        ),
        (
            "relative_improvement".into(),
            e.relative_improvement()
                .map_or("NA".into(), |r| r.to_string()),
        ),
    ];
    lines.extend(report.metadata.iter().cloned());
    lines.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

/// Writes `scores.csv` alone.
pub fn write_scores(path: &Path, scores: &[ScoredSample]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::InvalidInput(
            "nothing to report: no scored samples".into(),
        ));
    }
    write_atomic(path, scores_csv(scores).as_bytes())
}

/// Writes `heatmap_f.csv` and `heatmap_g.csv` into `out_dir`.
pub fn write_heatmaps(out_dir: &Path, grid: &HeatmapGrid) -> Result<()> {
    write_atomic(
        &out_dir.join(HEATMAP_F_FILE),
        grid_csv(grid, &grid.values_f).as_bytes(),
    )?;
    write_atomic(
        &out_dir.join(HEATMAP_G_FILE),
        grid_csv(grid, &grid.values_g).as_bytes(),
    )
}

/// Writes all report files into `out_dir`, creating it if needed.
///
/// Everything is rendered before the first file is written, so invalid input
/// leaves the directory untouched.
pub fn export_report(out_dir: &Path, report: &Report<'_>) -> Result<Vec<PathBuf>> {
    if report.evaluation.scores.is_empty() {
        return Err(Error::InvalidInput(
            "nothing to report: no scored samples".into(),
        ));
    }
    let grid = report.heatmap;
    let files = [
        (SCORES_FILE, scores_csv(&report.evaluation.scores)),
        (CURVE_F_FILE, curve_csv(&report.evaluation.curve_f)),
        (CURVE_G_FILE, curve_csv(&report.evaluation.curve_g)),
        (HEATMAP_F_FILE, grid_csv(grid, &grid.values_f)),
        (HEATMAP_G_FILE, grid_csv(grid, &grid.values_g)),
        (SUMMARY_FILE, summary_text(report)),
    ];
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    files
        .into_iter()
        .map(|(name, body)| {
            let path = out_dir.join(name);
            write_atomic(&path, body.as_bytes())?;
            Ok(path)
        })
        .collect()
}

/// Parses `summary.txt` back into ordered key/value pairs.
pub fn read_summary(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once(": ")
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .ok_or_else(|| Error::parse("summary", format!("bad line {l:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::bench::{run_benchmark, synthetic_benchmark};
    use crate::eval::heatmap::{heatmap, Bounds, HeatmapSource};
    use crate::eval::score::ScoreMethod;

    fn sample_run() -> (Evaluation, HeatmapGrid) {
        let bench = synthetic_benchmark(3, 4, 40, 5.0).unwrap();
        let (det, eval) = run_benchmark(&bench, &ScoreMethod::Classical).unwrap();
        let bounds = Bounds::around_training(det.training()).unwrap();
        let grid = heatmap(HeatmapSource::Covariance(det.covariance()), bounds, 11, 9).unwrap();
        (eval, grid)
    }

    #[test]
    fn writes_every_file_with_headers() {
        let (eval, grid) = sample_run();
        let dir = tempfile::tempdir().unwrap();
        let report = Report {
            evaluation: &eval,
            heatmap: &grid,
            metadata: vec![("seed".into(), "3".into())],
        };
        let written = export_report(dir.path(), &report).unwrap();
        assert_eq!(written.len(), 6);
        let head = |name: &str| {
            std::fs::read_to_string(dir.path().join(name))
                .unwrap()
                .lines()
                .next()
                .unwrap()
                .to_owned()
        };
        assert_eq!(
            head(SCORES_FILE),
            "source_id,label,is_anomaly,rank,g,f,f_method"
        );
        assert_eq!(head(CURVE_F_FILE), "threshold,error_rate");
        assert_eq!(head(CURVE_G_FILE), "threshold,error_rate");
        assert_eq!(head(HEATMAP_F_FILE), "x,y,value");
        assert_eq!(head(HEATMAP_G_FILE), "x,y,value");
        let heat = std::fs::read_to_string(dir.path().join(HEATMAP_G_FILE)).unwrap();
        assert_eq!(heat.lines().count(), 1 + 11 * 9);
        let summary = read_summary(&dir.path().join(SUMMARY_FILE)).unwrap();
        assert!(summary.iter().any(|(k, v)| k == "seed" && v == "3"));
        assert!(summary.iter().any(|(k, _)| k == "relative_improvement"));
    }

    #[test]
    fn empty_scores_write_nothing() {
        let (mut eval, grid) = sample_run();
        eval.scores.clear();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let report = Report {
            evaluation: &eval,
            heatmap: &grid,
            metadata: Vec::new(),
        };
        assert!(export_report(&out, &report).is_err());
        assert!(!out.exists());
    }
}
