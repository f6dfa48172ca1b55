//! Threshold sweeps over min-max normalized scores.

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLDS: usize = 1001;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    /// Evenly spaced in `[0, 1]`.
    pub thresholds: Vec<f64>,
    pub error_rates: Vec<f64>,
    pub min_error: f64,
    /// First threshold reaching `min_error`.
    pub argmin_threshold: f64,
}

/// Min-max normalizes `scores` and sweeps `num_thresholds` thresholds.
///
/// A sample is predicted anomalous when its normalized score exceeds the
/// threshold; at threshold 0 every sample is predicted anomalous, so the
/// curve starts at the fraction of normals and ends at the fraction of
/// anomalies.
pub fn normalize_and_sweep(
    scores: &[f64],
    is_anomaly: &[bool],
    num_thresholds: usize,
) -> Result<ErrorCurve> {
    if scores.len() != is_anomaly.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            found: is_anomaly.len(),
        });
    }
    if num_thresholds < 2 {
        return Err(Error::InvalidInput("need at least two thresholds".into()));
    }
    if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::NonFinite(format!("score {s}")));
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::Degenerate(
            "scores need at least two distinct values".into(),
        ));
    }
    let normalized: Vec<f64> = scores.iter().map(|s| (s - min) / (max - min)).collect();
    let n = scores.len() as f64;
    let thresholds: Vec<f64> = (0..num_thresholds)
        .map(|k| k as f64 / (num_thresholds - 1) as f64)
        .collect();
    let error_rates: Vec<f64> = thresholds
        .iter()
        .map(|&eps| {
            let wrong = normalized
                .iter()
                .zip(is_anomaly)
                .filter(|(&s, &a)| (eps == 0.0 || s > eps) != a)
                .count();
            wrong as f64 / n
        })
        .collect();
    let (best, &min_error) = error_rates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two thresholds");
    Ok(ErrorCurve {
        argmin_threshold: thresholds[best],
        thresholds,
        error_rates,
        min_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_class_priors() {
        let scores = [0.1, 0.5, 0.2, 0.9, 0.4];
        let labels = [false, true, false, true, false];
        let c = normalize_and_sweep(&scores, &labels, DEFAULT_THRESHOLDS).unwrap();
        assert_eq!(c.thresholds.len(), 1001);
        assert_eq!(c.error_rates[0], 3.0 / 5.0);
        assert_eq!(*c.error_rates.last().unwrap(), 2.0 / 5.0);
    }

    #[test]
    fn separated_scores_reach_zero_error() {
        let scores = [1.0, 2.0, 3.0, 10.0, 11.0];
        let labels = [false, false, false, true, true];
        let c = normalize_and_sweep(&scores, &labels, 101).unwrap();
        assert_eq!(c.min_error, 0.0);
        assert!(c.argmin_threshold >= 0.2 && c.argmin_threshold < 0.9);
        assert_eq!(
            c.min_error,
            c.error_rates.iter().copied().fold(1.0, f64::min)
        );
    }

    #[test]
    fn ties_at_threshold_are_normal() {
        // normalized scores 0, 0.5, 1
        let c = normalize_and_sweep(&[0.0, 1.0, 2.0], &[false, false, true], 3).unwrap();
        assert_eq!(c.error_rates, vec![2.0 / 3.0, 0.0, 1.0 / 3.0]);
    }

    #[test]
    fn constant_scores_are_rejected() {
        assert!(normalize_and_sweep(&[1.0, 1.0], &[true, false], 11).is_err());
        assert!(normalize_and_sweep(&[1.0], &[true], 11).is_err());
        assert!(normalize_and_sweep(&[1.0, 2.0], &[true], 11).is_err());
    }
}
