//! Resampling and extraction of the fixed-length analysis segment.

use std::f64::consts::PI;

use super::wav::Recording;
use crate::error::{Error, Result};

/// Sample rate every segment is converted to before analysis.
pub const PIPELINE_RATE: u32 = 16_000;

/// Half width of the interpolation kernel in zero crossings.
const SINC_HALF_WIDTH: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentConfig {
    pub target_rate: u32,
    pub duration_s: f64,
    /// Step of the onset scan.
    pub hop_s: f64,
    /// A window qualifies when its RMS reaches this fraction of the
    /// whole-recording RMS.
    pub silence_fraction: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            target_rate: PIPELINE_RATE,
            duration_s: 0.28,
            hop_s: 0.008,
            silence_fraction: 0.1,
        }
    }
}

impl SegmentConfig {
    pub fn segment_len(&self) -> usize {
        (self.duration_s * f64::from(self.target_rate)).round() as usize
    }

    pub fn hop_len(&self) -> usize {
        ((self.hop_s * f64::from(self.target_rate)).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AudioSegment {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    /// Offset of the first sample within the (resampled) recording.
    pub start_s: f64,
}

impl AudioSegment {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

pub fn rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Band-limited resampling with a Hann-windowed sinc kernel. The kernel is
/// renormalized per output sample so that DC passes unchanged.
pub fn resample(samples: &[f64], from_rate: u32, to_rate: u32) -> Vec<f64> {
    if from_rate == to_rate || samples.is_empty() {
        return samples.to_vec();
    }
    let (from, to) = (u64::from(from_rate), u64::from(to_rate));
    let out_len = (samples.len() as u64 * to / from) as usize;
    let cutoff = (to as f64 / from as f64).min(1.0);
    let reach = SINC_HALF_WIDTH / cutoff;
    let last = samples.len() as isize - 1;
    (0..out_len)
        .map(|j| {
            let t = (j as u64 * from) as f64 / to as f64;
            let lo = ((t - reach).ceil() as isize).max(0);
            let hi = ((t + reach).floor() as isize).min(last);
            let (mut acc, mut norm) = (0.0, 0.0);
            for k in lo..=hi {
                let x = k as f64 - t;
                let arg = PI * cutoff * x;
                let sinc = if arg == 0.0 { 1.0 } else { arg.sin() / arg };
                let w = sinc * 0.5 * (1.0 + (PI * x / reach).cos());
                acc += w * samples[k as usize];
                norm += w;
            }
            if norm == 0.0 {
                0.0
            } else {
                acc / norm
            }
        })
        .collect()
}

/// Finds the first window of `cfg.duration_s` that starts on non-silent audio.
///
/// The recording is resampled to `cfg.target_rate` and scanned in hops. A
/// start position qualifies when both the hop beginning there and the full
/// window reach the silence threshold, so leading silence is skipped up to
/// one hop of the onset.
pub fn extract_segment(recording: &Recording, cfg: &SegmentConfig) -> Result<AudioSegment> {
    let samples = resample(&recording.samples, recording.sample_rate, cfg.target_rate);
    let len = cfg.segment_len();
    let hop = cfg.hop_len();
    let none = || Error::NoQualifyingWindow {
        duration_s: cfg.duration_s,
    };
    if len == 0 || samples.len() < len {
        return Err(none());
    }
    let threshold = cfg.silence_fraction * rms(&samples);
    if !(threshold > 0.0) {
        return Err(none());
    }
    (0..=samples.len() - len)
        .step_by(hop)
        .find(|&start| {
            rms(&samples[start..start + hop.min(len)]) >= threshold
                && rms(&samples[start..start + len]) >= threshold
        })
        .map(|start| AudioSegment {
            samples: samples[start..start + len].to_vec(),
            sample_rate: cfg.target_rate,
            start_s: start as f64 / f64::from(cfg.target_rate),
        })
        .ok_or_else(none)
}
