//! Synthetic anisotropic benchmark used when no audio corpus is available.
//!
//! Normals come from a zero-mean Gaussian whose x and y standard deviations
//! differ by `ratio`; anomalies sit on an isotropic ring at roughly the
//! normals' 90th-percentile radius. Along the long axis such anomalies are
//! no farther out than ordinary normals, which is exactly where a
//! covariance-aware score should beat plain distance.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::score::{score_testset, LabeledPoint, ScoreMethod, ScoredSample};
use super::sweep::{normalize_and_sweep, ErrorCurve, DEFAULT_THRESHOLDS};
use crate::audio::Label;
use crate::error::{Error, Result};
use crate::model::Detector;
use crate::oracle::FeatureVector;
use crate::rng;

/// Draws used to estimate the ring radius.
const RADIUS_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub n_train: usize,
    pub n_test: usize,
    /// Ratio of the x to the y standard deviation of the normals.
    pub ratio: f64,
    pub anomaly_fraction: f64,
    /// Quantile of the normal radius distribution the ring is placed at.
    pub ring_quantile: f64,
    /// Relative standard deviation of the ring radius.
    pub ring_width: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n_train: 4,
            n_test: 100,
            ratio: 5.0,
            anomaly_fraction: 0.3,
            ring_quantile: 0.9,
            ring_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBenchmark {
    /// Raw (uncentered) training normals.
    pub training: Vec<FeatureVector>,
    pub tests: Vec<LabeledPoint>,
    pub ring_radius: f64,
}

pub fn synthetic_benchmark(
    seed: u64,
    n_train: usize,
    n_test: usize,
    ratio: f64,
) -> Result<SyntheticBenchmark> {
    synthetic_benchmark_with(
        seed,
        &BenchmarkConfig {
            n_train,
            n_test,
            ratio,
            ..BenchmarkConfig::default()
        },
    )
}

pub fn synthetic_benchmark_with(seed: u64, cfg: &BenchmarkConfig) -> Result<SyntheticBenchmark> {
    if !(cfg.ratio >= 1.0) || !cfg.ratio.is_finite() {
        return Err(Error::InvalidInput(format!(
            "anisotropy ratio {} < 1",
            cfg.ratio
        )));
    }
    if cfg.n_train < 2 || cfg.n_test == 0 {
        return Err(Error::InvalidInput(
            "need n_train >= 2 and n_test >= 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.anomaly_fraction) || !(0.0..1.0).contains(&cfg.ring_quantile) {
        return Err(Error::InvalidInput("fractions must lie in [0, 1]".into()));
    }
    let sigma = [1.0, 1.0 / cfg.ratio];
    let normal = |r: &mut rng::SimRng| -> [f64; 2] {
        [
            sigma[0] * r.sample::<f64, _>(StandardNormal),
            sigma[1] * r.sample::<f64, _>(StandardNormal),
        ]
    };

    let mut radius_rng = rng::rng(rng::sub_seed(seed, "ring"));
    let mut radii: Vec<f64> = (0..RADIUS_SAMPLES)
        .map(|_| {
            let [x, y] = normal(&mut radius_rng);
            x.hypot(y)
        })
        .collect();
    radii.sort_by(f64::total_cmp);
    let ring_radius =
        radii[((RADIUS_SAMPLES as f64 * cfg.ring_quantile) as usize).min(RADIUS_SAMPLES - 1)];

    let mut train_rng = rng::rng(rng::sub_seed(seed, "train"));
    let training = (0..cfg.n_train)
        .map(|_| FeatureVector::new(normal(&mut train_rng).to_vec()))
        .collect::<Result<Vec<_>>>()?;

    let mut test_rng = rng::rng(rng::sub_seed(seed, "test"));
    let n_anomalies = (cfg.n_test as f64 * cfg.anomaly_fraction).round() as usize;
    let mut tests = Vec::with_capacity(cfg.n_test);
    for i in 0..cfg.n_test - n_anomalies {
        tests.push(LabeledPoint {
            source_id: format!("normal-{i:03}"),
            label: Label::SyntheticNormal,
            point: FeatureVector::new(normal(&mut test_rng).to_vec())?,
        });
    }
    for i in 0..n_anomalies {
        let angle = test_rng.random_range(0.0..2.0 * PI);
        let r = ring_radius * (1.0 + cfg.ring_width * test_rng.sample::<f64, _>(StandardNormal));
        tests.push(LabeledPoint {
            source_id: format!("anomaly-{i:03}"),
            label: Label::SyntheticAnomaly,
            point: FeatureVector::new(vec![r * angle.cos(), r * angle.sin()])?,
        });
    }
    Ok(SyntheticBenchmark {
        training,
        tests,
        ring_radius,
    })
}

/// Both error curves of one scored test set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub scores: Vec<ScoredSample>,
    pub curve_f: ErrorCurve,
    pub curve_g: ErrorCurve,
}

impl Evaluation {
    /// Sweeps `g` over every sample and `f` over the samples where it is
    /// defined.
    pub fn from_scores(scores: Vec<ScoredSample>, num_thresholds: usize) -> Result<Self> {
        let g: Vec<f64> = scores.iter().map(|s| s.g).collect();
        let labels: Vec<bool> = scores.iter().map(ScoredSample::is_anomaly).collect();
        let curve_g = normalize_and_sweep(&g, &labels, num_thresholds)?;
        let (f, f_labels): (Vec<f64>, Vec<bool>) = scores
            .iter()
            .filter_map(|s| s.f.map(|f| (f, s.is_anomaly())))
            .unzip();
        let curve_f = normalize_and_sweep(&f, &f_labels, num_thresholds)?;
        Ok(Self {
            scores,
            curve_f,
            curve_g,
        })
    }

    /// `(min_g − min_f) / min_g`, undefined when `g` already separates
    /// perfectly.
    pub fn relative_improvement(&self) -> Option<f64> {
        let g = self.curve_g.min_error;
        (g > 0.0).then(|| (g - self.curve_f.min_error) / g)
    }
}

/// Fits a detector on the benchmark's training normals and evaluates it.
pub fn run_benchmark(
    bench: &SyntheticBenchmark,
    method: &ScoreMethod,
) -> Result<(Detector, Evaluation)> {
    let ids = (0..bench.training.len())
        .map(|i| format!("train-{i:03}"))
        .collect();
    let detector = Detector::fit(bench.training.clone(), ids, false)?;
    let scores = score_testset(&detector, &bench.tests, method)?;
    let evaluation = Evaluation::from_scores(scores, DEFAULT_THRESHOLDS)?;
    Ok((detector, evaluation))
}
