//! The trained detector and its text file format.
//!
//! ```text
//! qad-model 1
//! dim 2
//! vectors 4
//! centroid <d values>
//! trace_factor <tr C>
//! covariance <d·d values, row-major>
//! weights <M values>
//! vector <d values> <source id>
//! ...
//! ```
//!
//! Vectors are stored in the training frame (centroid already removed).
//! Every derived line is recomputed on load and must agree with the stored
//! vectors.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::circuit::TrainingModel;
use crate::error::{Error, Result};
use crate::oracle::{center, covariance_matrix, CovarianceMatrix, FeatureVector, TrainingSet};

const FORMAT_HEADER: &str = "qad-model";
const FORMAT_VERSION: u32 = 1;
const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    training: TrainingSet,
    source_ids: Vec<String>,
    covariance: CovarianceMatrix,
    circuit: TrainingModel,
}

impl Detector {
    /// Centers `vectors` (unless `pre_centered`) and derives every parameter.
    pub fn fit(
        vectors: Vec<FeatureVector>,
        source_ids: Vec<String>,
        pre_centered: bool,
    ) -> Result<Self> {
        let ts = if pre_centered {
            TrainingSet::assume_centered(vectors)?
        } else {
            center(vectors)?
        };
        Self::from_training_set(ts, source_ids)
    }

    pub fn from_training_set(training: TrainingSet, source_ids: Vec<String>) -> Result<Self> {
        if source_ids.len() != training.len() {
            return Err(Error::DimensionMismatch {
                expected: training.len(),
                found: source_ids.len(),
            });
        }
        if training.is_degenerate() {
            return Err(Error::Degenerate("every training vector is zero".into()));
        }
        let covariance = covariance_matrix(&training)?;
        let circuit = TrainingModel::new(&training)?;
        Ok(Self {
            training,
            source_ids,
            covariance,
            circuit,
        })
    }

    pub fn training(&self) -> &TrainingSet {
        &self.training
    }

    pub fn source_ids(&self) -> &[String] {
        &self.source_ids
    }

    pub fn centroid(&self) -> &[f64] {
        self.training.centroid()
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.covariance
    }

    pub fn circuit(&self) -> &TrainingModel {
        &self.circuit
    }

    pub fn dim(&self) -> usize {
        self.training.dim()
    }

    pub fn to_text(&self) -> String {
        let join = |vals: &[f64]| {
            vals.iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let d = self.dim();
        let cov: Vec<f64> = (0..d * d)
            .map(|k| self.covariance.entries()[(k / d, k % d)])
            .collect();
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_HEADER} {FORMAT_VERSION}");
        let _ = writeln!(out, "dim {d}");
        let _ = writeln!(out, "vectors {}", self.training.len());
        let _ = writeln!(out, "centroid {}", join(self.centroid()));
        let _ = writeln!(out, "trace_factor {}", self.covariance.trace_factor());
        let _ = writeln!(out, "covariance {}", join(&cov));
        let _ = writeln!(out, "weights {}", join(self.circuit.weights()));
        for (v, id) in self.training.vectors().iter().zip(&self.source_ids) {
            let _ = writeln!(out, "vector {} {id}", join(v.components()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |reason: String| Error::parse("model file", reason);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| err(format!("missing `{key}` line")))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| err(format!("expected `{key}`, found {line:?}")))
        };
        let floats = |s: &str, key: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|e| err(format!("{key}: {e}"))))
                .collect()
        };
        let version = next(FORMAT_HEADER)?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(err(format!("unsupported version {version:?}")));
        }
        let d: usize = next("dim")?
            .trim()
            .parse()
            .map_err(|_| err("bad dim".into()))?;
        let m: usize = next("vectors")?
            .trim()
            .parse()
            .map_err(|_| err("bad vector count".into()))?;
        let centroid = floats(&next("centroid")?, "centroid")?;
        let trace_factor = floats(&next("trace_factor")?, "trace_factor")?;
        let covariance = floats(&next("covariance")?, "covariance")?;
        let weights = floats(&next("weights")?, "weights")?;
        if centroid.len() != d
            || trace_factor.len() != 1
            || covariance.len() != d * d
            || weights.len() != m
        {
            return Err(err("field lengths disagree with dim/vectors".into()));
        }
        let mut vectors = Vec::with_capacity(m);
        let mut ids = Vec::with_capacity(m);
        for _ in 0..m {
            let line = next("vector")?;
            let mut parts = line.splitn(d + 1, ' ');
            let comps = (0..d)
                .map(|_| {
                    parts
                        .next()
                        .ok_or_else(|| err("short vector line".into()))?
                        .parse::<f64>()
                        .map_err(|e| err(format!("vector: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            vectors.push(FeatureVector::new(comps)?);
            ids.push(parts.next().unwrap_or_default().to_owned());
        }
        if lines.next().is_some() {
            return Err(err("trailing content".into()));
        }

        // The stored vectors are in the training frame; keep the centroid
        // that produced them.
        let ts = TrainingSet::assume_centered(vectors)?.with_centroid(centroid)?;
        let detector = Self::from_training_set(ts, ids)?;

        let close =
            |a: f64, b: f64| (a - b).abs() <= CONSISTENCY_TOL * (1.0 + a.abs().max(b.abs()));
        let stored_cov = DMatrix::from_row_slice(d, d, &covariance);
        let consistent = close(trace_factor[0], detector.covariance.trace_factor())
            && stored_cov
                .iter()
                .zip(detector.covariance.entries().transpose().iter())
                .all(|(a, b)| close(*a, *b))
            && weights
                .iter()
                .zip(detector.circuit.weights())
                .all(|(a, b)| close(*a, *b));
        if !consistent {
            return Err(err(
                "derived parameters do not match the stored vectors".into()
            ));
        }
        Ok(detector)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::VIOLIN_TRAINING_VECTORS;

    fn violin() -> Detector {
        let vectors = VIOLIN_TRAINING_VECTORS
            .iter()
            .map(|v| FeatureVector::from(*v))
            .collect();
        let ids = (0..4).map(|i| format!("violin {i}.wav")).collect();
        Detector::fit(vectors, ids, true).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let d = violin();
        let text = d.to_text();
        let back = Detector::from_text(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.source_ids()[3], "violin 3.wav");
    }

    #[test]
    fn centered_fit_keeps_centroid() {
        let vectors = vec![
            FeatureVector::from([1.0, 2.0]),
            FeatureVector::from([3.0, 2.0]),
            FeatureVector::from([2.0, 4.0]),
        ];
        let d = Detector::fit(vectors, vec!["a".into(), "b".into(), "c".into()], false).unwrap();
        assert!((d.centroid()[0] - 2.0).abs() < 1e-15);
        assert!((d.centroid()[1] - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(Detector::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn tampered_file_is_rejected() {
        let text = violin().to_text();
        let tampered: String = text
            .lines()
            .map(|l| {
                if l.starts_with("trace_factor") {
                    "trace_factor 0.9"
                } else {
                    l
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        assert!(Detector::from_text(&tampered).is_err());
        assert!(Detector::from_text(&text.replace("qad-model 1", "qad-model 2")).is_err());
        assert!(Detector::from_text("qad-model 1\ndim 2\n").is_err());
    }

    #[test]
    fn degenerate_training_is_rejected() {
        let zeros = vec![FeatureVector::from([0.0, 0.0]); 4];
        let err = Detector::fit(zeros, vec![String::new(); 4], true).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Numerical);
    }
}
