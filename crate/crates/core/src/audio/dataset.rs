//! Manifests, feature tables and the audio-to-feature pipeline.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mfcc::{MfccConfig, MfccExtractor};
use super::pca::{pca_fit, PcaModel};
use super::segment::{extract_segment, SegmentConfig};
use super::wav::load_wav;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Violin,
    Guitar,
    Crowd,
    Glass,
    SyntheticNormal,
    SyntheticAnomaly,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::Violin,
        Label::Guitar,
        Label::Crowd,
        Label::Glass,
        Label::SyntheticNormal,
        Label::SyntheticAnomaly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Violin => "violin",
            Label::Guitar => "guitar",
            Label::Crowd => "crowd",
            Label::Glass => "glass",
            Label::SyntheticNormal => "synthetic-normal",
            Label::SyntheticAnomaly => "synthetic-anomaly",
        }
    }

    /// Violin recordings (and their synthetic stand-in) form the normal class.
    pub fn is_anomaly(self) -> bool {
        !matches!(self, Label::Violin | Label::SyntheticNormal)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::parse("label", format!("unknown label {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// The path exactly as written in the manifest.
    pub source_id: String,
    /// `source_id` resolved against the manifest's directory.
    pub path: PathBuf,
    pub label: Label,
    pub split: Split,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestRecord {
    path: String,
    label: Label,
    split: Split,
}

/// Reads a `path,label,split` CSV. Relative paths are resolved against the
/// manifest's own directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::Reader::from_reader(file);
    let expected = ["path", "label", "split"];
    if reader.headers()?.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            "manifest",
            "header must be `path,label,split`",
        ));
    }
    let mut entries = Vec::new();
    for record in reader.deserialize::<ManifestRecord>() {
        let record = record?;
        entries.push(ManifestEntry {
            path: base.join(&record.path),
            source_id: record.path,
            label: record.label,
            split: record.split,
        });
    }
    Ok(entries)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let records: Vec<ManifestRecord> = entries
        .iter()
        .map(|e| ManifestRecord {
            path: e.source_id.clone(),
            label: e.label,
            split: e.split,
        })
        .collect();
    crate::io::write_csv_atomic(path, &records)
}

/// One row of the feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub source_id: String,
    pub label: Label,
    pub split: Split,
    pub feature1: f64,
    pub feature2: f64,
}

impl FeatureRow {
    pub fn point(&self) -> [f64; 2] {
        [self.feature1, self.feature2]
    }
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let expected = ["source_id", "label", "split", "feature1", "feature2"];
    if reader.headers()?.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            "feature table",
            "header must be `source_id,label,split,feature1,feature2`",
        ));
    }
    let rows = reader
        .deserialize::<FeatureRow>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if let Some(r) = rows
        .iter()
        .find(|r| !(r.feature1.is_finite() && r.feature2.is_finite()))
    {
        return Err(Error::NonFinite(format!("features of {}", r.source_id)));
    }
    Ok(rows)
}

pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    crate::io::write_csv_atomic(path, rows)
}

/// Which manifest rows the PCA is fitted on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PcaRows {
    /// Only the train split; test files never influence the features.
    #[default]
    Train,
    /// Every row, train and test.
    All,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineConfig {
    pub segment: SegmentConfig,
    pub mfcc: MfccConfig,
    pub pca_rows: PcaRows,
}

/// Outcome of processing one manifest entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDiagnostic {
    pub source_id: String,
    pub status: &'static str,
    pub segment_start_s: Option<f64>,
    pub message: String,
}

impl FileDiagnostic {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone)]
pub struct FeatureExtraction {
    pub diagnostics: Vec<FileDiagnostic>,
    /// Present only when every file was processed.
    pub rows: Vec<FeatureRow>,
    pub pca: Option<PcaModel>,
}

impl FeatureExtraction {
    pub fn failures(&self) -> impl Iterator<Item = &FileDiagnostic> {
        self.diagnostics.iter().filter(|d| !d.is_ok())
    }
}

/// Loads, segments and analyses one file into its flattened MFCC vector.
pub fn file_vector(
    path: &Path,
    cfg: &PipelineConfig,
    extractor: &MfccExtractor,
) -> Result<(Vec<f64>, f64)> {
    let recording = load_wav(path)?;
    let segment = extract_segment(&recording, &cfg.segment)?;
    Ok((extractor.compute(&segment)?.flatten(), segment.start_s))
}

/// Runs every manifest entry through the audio chain and, when all succeed,
/// fits the PCA on the rows selected by `cfg.pca_rows` and projects every
/// file.
pub fn extract_features(
    entries: &[ManifestEntry],
    cfg: &PipelineConfig,
) -> Result<FeatureExtraction> {
    if cfg.segment.target_rate != cfg.mfcc.sample_rate {
        return Err(Error::InvalidInput(
            "segment and MFCC sample rates differ".into(),
        ));
    }
    let extractor = MfccExtractor::new(cfg.mfcc.clone())?;
    let mut vectors = Vec::with_capacity(entries.len());
    let mut diagnostics = Vec::with_capacity(entries.len());
    for entry in entries {
        match file_vector(&entry.path, cfg, &extractor) {
            Ok((v, start)) => {
                diagnostics.push(FileDiagnostic {
                    source_id: entry.source_id.clone(),
                    status: "ok",
                    segment_start_s: Some(start),
                    message: String::new(),
                });
                vectors.push(Some(v));
            }
            Err(e) => {
                diagnostics.push(FileDiagnostic {
                    source_id: entry.source_id.clone(),
                    status: "error",
                    segment_start_s: None,
                    message: e.to_string(),
                });
                vectors.push(None);
            }
        }
    }
    let failed = diagnostics.iter().any(|d| !d.is_ok());
    if failed {
        return Ok(FeatureExtraction {
            diagnostics,
            rows: Vec::new(),
            pca: None,
        });
    }
    let vectors: Vec<Vec<f64>> = vectors.into_iter().flatten().collect();
    let train: Vec<Vec<f64>> = entries
        .iter()
        .zip(&vectors)
        .filter(|(e, _)| cfg.pca_rows == PcaRows::All || e.split == Split::Train)
        .map(|(_, v)| v.clone())
        .collect();
    let pca = pca_fit(&train, 2)?;
    let rows = entries
        .iter()
        .zip(&vectors)
        .map(|(e, v)| {
            let [feature1, feature2] = pca.project(v)?;
            Ok(FeatureRow {
                source_id: e.source_id.clone(),
                label: e.label,
                split: e.split,
                feature1,
                feature2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureExtraction {
        diagnostics,
        rows,
        pca: Some(pca),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert!("cello".parse::<Label>().is_err());
        assert!(!Label::Violin.is_anomaly());
        assert!(Label::Glass.is_anomaly());
    }

    #[test]
    fn manifest_paths_resolve_relative_to_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(
            &path,
            "path,label,split\na.wav,violin,train\nsub/b.wav,glass,test\n",
        )
        .unwrap();
        let entries = read_manifest(&path).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[1].path, dir.path().join("sub/b.wav"));
        assert_eq!(entries[1].source_id, "sub/b.wav");
        assert_eq!(entries[1].label, Label::Glass);
        assert_eq!(entries[1].split, Split::Test);
    }

    #[test]
    fn malformed_manifests_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "file,label,split\na.wav,violin,train\n").unwrap();
        assert!(read_manifest(&path).is_err());
        std::fs::write(&path, "path,label,split\na.wav,cello,train\n").unwrap();
        assert!(read_manifest(&path).is_err());
        std::fs::write(&path, "path,label,split\na.wav,violin,validate\n").unwrap();
        assert!(read_manifest(&path).is_err());
    }

    #[test]
    fn feature_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let rows = vec![
            FeatureRow {
                source_id: "a.wav".into(),
                label: Label::SyntheticNormal,
                split: Split::Train,
                feature1: 0.125,
                feature2: -3.5e-4,
            },
            FeatureRow {
                source_id: "b,c.wav".into(),
                label: Label::Crowd,
                split: Split::Test,
                feature1: 1.0 / 3.0,
                feature2: 2.0,
            },
        ];
        write_features(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("source_id,label,split,feature1,feature2\n"));
        assert_eq!(read_features(&path).unwrap(), rows);
    }
}
