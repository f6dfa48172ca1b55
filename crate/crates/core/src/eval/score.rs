//! Scoring a test set with the Euclidean and proximity measures.

use crate::audio::Label;
use crate::circuit::{proximity_inverse_rotation, InverseReadout};
use crate::error::{Error, Result};
use crate::model::Detector;
use crate::oracle::{euclidean_score, proximity_classical, FeatureVector};
use crate::readout::{LuminescenceConfig, ReadoutNoise};
use crate::rng;

/// How the proximity measure `f` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreMethod {
    Classical,
    /// Inverse-rotation circuit with an exact population readout.
    QuantumExact,
    /// Inverse-rotation circuit read out through the photon-count model.
    /// With Poisson noise each sample gets its own stream derived from the
    /// configured seed.
    QuantumPhoton(LuminescenceConfig),
}

impl ScoreMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScoreMethod::Classical => "classical",
            ScoreMethod::QuantumExact => "quantum-exact",
            ScoreMethod::QuantumPhoton(_) => "quantum-photon",
        }
    }
}

/// A test point in the original feature frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub source_id: String,
    pub label: Label,
    pub point: FeatureVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSample {
    pub source_id: String,
    pub label: Label,
    /// `|z|²` in the training frame.
    pub g: f64,
    /// `None` when the sample sits exactly on the training centroid.
    pub f: Option<f64>,
    pub f_method: &'static str,
    /// Position in ascending-`g` order (0-based, ties by input order).
    pub rank: usize,
}

impl ScoredSample {
    pub fn is_anomaly(&self) -> bool {
        self.label.is_anomaly()
    }
}

/// Shifts every test by the training centroid and computes `g` and `f`.
pub fn score_testset(
    detector: &Detector,
    tests: &[LabeledPoint],
    method: &ScoreMethod,
) -> Result<Vec<ScoredSample>> {
    if tests.is_empty() {
        return Err(Error::InvalidInput("empty test set".into()));
    }
    let mut scored = tests
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let z = detector.training().to_training_frame(&t.point)?;
            let g = euclidean_score(&z);
            let f = if g == 0.0 {
                None
            } else {
                Some(proximity(detector, &z, method, i)?)
            };
            Ok(ScoredSample {
                source_id: t.source_id.clone(),
                label: t.label,
                g,
                f,
                f_method: method.as_str(),
                rank: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].g.total_cmp(&scored[b].g));
    for (rank, i) in order.into_iter().enumerate() {
        scored[i].rank = rank;
    }
    Ok(scored)
}

fn proximity(
    detector: &Detector,
    z: &FeatureVector,
    method: &ScoreMethod,
    index: usize,
) -> Result<f64> {
    match method {
        ScoreMethod::Classical => proximity_classical(z, detector.covariance()),
        ScoreMethod::QuantumExact => {
            Ok(proximity_inverse_rotation(detector.circuit(), z, InverseReadout::Exact)?.f_value)
        }
        ScoreMethod::QuantumPhoton(cfg) => {
            let cfg = match cfg.noise {
                ReadoutNoise::None => cfg.clone(),
                ReadoutNoise::Poisson { seed } => cfg.clone().with_noise(ReadoutNoise::Poisson {
                    seed: rng::item_seed(seed, index as u64),
                }),
            };
            Ok(
                proximity_inverse_rotation(detector.circuit(), z, InverseReadout::Photon(&cfg))?
                    .f_value,
            )
        }
    }
}
