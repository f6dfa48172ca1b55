//! Mel-frequency cepstral coefficients.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::segment::AudioSegment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MfccConfig {
    pub sample_rate: u32,
    /// Samples per frame; also the FFT size.
    pub frame_len: usize,
    pub hop_len: usize,
    pub num_frames: usize,
    pub num_filters: usize,
    /// Cepstral coefficients kept, starting from c₁.
    pub num_coeffs: usize,
    pub pre_emphasis: f64,
    pub log_floor: f64,
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for MfccConfig {
    /// 16 ms frames with an 8 ms hop at 16 kHz, giving 12 × 35 coefficients
    /// for a 0.28 s segment.
    fn default() -> Self {
        Self {
            sample_rate: 16_000,
            frame_len: 256,
            hop_len: 128,
            num_frames: 35,
            num_filters: 26,
            num_coeffs: 12,
            pre_emphasis: 0.97,
            log_floor: 1e-10,
            f_min: 0.0,
            f_max: 8_000.0,
        }
    }
}

impl MfccConfig {
    /// Samples spanned by `num_frames` frames.
    pub fn span(&self) -> usize {
        (self.num_frames - 1) * self.hop_len + self.frame_len
    }

    /// Shortest accepted input; the tail is zero-padded by up to one hop.
    pub fn min_input_len(&self) -> usize {
        self.span().saturating_sub(self.hop_len)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.frame_len >= 2
            && self.hop_len >= 1
            && self.num_frames >= 1
            && self.num_filters >= 1
            && self.num_coeffs < self.num_filters
            && self.num_coeffs >= 1
            && self.f_min >= 0.0
            && self.f_max > self.f_min
            && self.f_max <= f64::from(self.sample_rate) / 2.0
            && self.log_floor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid MFCC config {self:?}")))
        }
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters on the HTK mel scale, sampled at the FFT bin
/// frequencies. Rows are filters, columns are bins `0..=frame_len/2`.
pub fn mel_filterbank(cfg: &MfccConfig) -> DMatrix<f64> {
    let bins = cfg.frame_len / 2 + 1;
    let (lo, hi) = (hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max));
    let edges: Vec<f64> = (0..cfg.num_filters + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (cfg.num_filters + 1) as f64))
        .collect();
    let bin_hz = f64::from(cfg.sample_rate) / cfg.frame_len as f64;
    DMatrix::from_fn(cfg.num_filters, bins, |m, k| {
        let f = k as f64 * bin_hz;
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        if f <= left || f >= right {
            0.0
        } else if f <= center {
            (f - left) / (center - left)
        } else {
            (right - f) / (right - center)
        }
    })
}

pub fn hamming(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// `num_coeffs × num_frames` cepstral array; column `t` describes frame `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccArray {
    pub coefficients: DMatrix<f64>,
}

impl MfccArray {
    pub fn shape(&self) -> (usize, usize) {
        self.coefficients.shape()
    }

    /// Frame-major flattening: all coefficients of frame 0, then frame 1, ...
    pub fn flatten(&self) -> Vec<f64> {
        self.coefficients.as_slice().to_vec()
    }
}

/// Reusable MFCC extractor holding the FFT plan, window and filterbank.
pub struct MfccExtractor {
    cfg: MfccConfig,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    window: Vec<f64>,
    filterbank: DMatrix<f64>,
}

impl MfccExtractor {
    pub fn new(cfg: MfccConfig) -> Result<Self> {
        cfg.validate()?;
        let fft = FftPlanner::new().plan_fft_forward(cfg.frame_len);
        Ok(Self {
            window: hamming(cfg.frame_len),
            filterbank: mel_filterbank(&cfg),
            fft,
            cfg,
        })
    }

    pub fn config(&self) -> &MfccConfig {
        &self.cfg
    }

    pub fn compute(&self, segment: &AudioSegment) -> Result<MfccArray> {
        let cfg = &self.cfg;
        if segment.sample_rate != cfg.sample_rate {
            return Err(Error::InvalidInput(format!(
                "segment is at {} Hz, MFCC expects {} Hz",
                segment.sample_rate, cfg.sample_rate
            )));
        }
        let x = &segment.samples;
        if x.len() < cfg.min_input_len() {
            return Err(Error::SegmentTooShort {
                needed: cfg.min_input_len(),
                found: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("audio sample {bad}")));
        }

        let span = cfg.span();
        let mut emphasized = vec![0.0; span];
        let used = x.len().min(span);
        emphasized[0] = x[0];
        for n in 1..used {
            emphasized[n] = x[n] - cfg.pre_emphasis * x[n - 1];
        }

        let bins = cfg.frame_len / 2 + 1;
        let mut buf = vec![Complex64::new(0.0, 0.0); cfg.frame_len];
        let mut coefficients = DMatrix::zeros(cfg.num_coeffs, cfg.num_frames);
        let mut power = nalgebra::DVector::zeros(bins);
        for t in 0..cfg.num_frames {
            let frame = &emphasized[t * cfg.hop_len..t * cfg.hop_len + cfg.frame_len];
            for ((b, s), w) in buf.iter_mut().zip(frame).zip(&self.window) {
                *b = Complex64::new(s * w, 0.0);
            }
            self.fft.process(&mut buf);
            for k in 0..bins {
                power[k] = buf[k].norm_sqr() / cfg.frame_len as f64;
            }
            let log_energies: Vec<f64> = (&self.filterbank * &power)
                .iter()
                .map(|e| e.max(cfg.log_floor).ln())
                .collect();
            let cepstrum = dct2_orthonormal(&log_energies);
            for c in 0..cfg.num_coeffs {
                coefficients[(c, t)] = cepstrum[c + 1];
            }
        }
        Ok(MfccArray { coefficients })
    }
}

/// Orthonormal DCT-II.
pub fn dct2_orthonormal(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    (0..x.len())
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            scale
                * x.iter()
                    .enumerate()
                    .map(|(m, v)| v * (PI * k as f64 * (2 * m + 1) as f64 / (2.0 * n)).cos())
                    .sum::<f64>()
        })
        .collect()
}

pub fn mfcc(segment: &AudioSegment, cfg: &MfccConfig) -> Result<MfccArray> {
    MfccExtractor::new(cfg.clone())?.compute(segment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(samples: Vec<f64>) -> AudioSegment {
        AudioSegment {
            samples,
            sample_rate: 16_000,
            start_s: 0.0,
        }
    }

    #[test]
    fn shape_is_12_by_35() {
        let x: Vec<f64> = (0..4480)
            .map(|i| ((i * 7919) % 101) as f64 / 101.0 - 0.5)
            .collect();
        let m = mfcc(&segment(x), &MfccConfig::default()).unwrap();
        assert_eq!(m.shape(), (12, 35));
        assert_eq!(m.flatten().len(), 420);
        assert!(m.coefficients.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn padding_policy() {
        let cfg = MfccConfig::default();
        assert_eq!(cfg.span(), 4608);
        assert_eq!(cfg.min_input_len(), 4480);
        assert!(matches!(
            mfcc(&segment(vec![0.1; 4479]), &cfg),
            Err(Error::SegmentTooShort {
                needed: 4480,
                found: 4479
            })
        ));
        assert!(mfcc(&segment(vec![0.1; 6000]), &cfg).is_ok());
    }

    #[test]
    fn constant_signal_gives_identical_interior_columns() {
        let m = mfcc(&segment(vec![0.25; 4480]), &MfccConfig::default()).unwrap();
        let c = &m.coefficients;
        // Frame 0 holds the pre-emphasis start-up sample and frame 34 the
        // zero padding; every other frame sees the same constant residue.
        for t in 2..34 {
            assert!((c.column(t) - c.column(1)).amax() < 1e-9);
        }
    }

    #[test]
    fn silent_signal_gives_identical_columns() {
        let m = mfcc(&segment(vec![0.0; 4480]), &MfccConfig::default()).unwrap();
        assert!(m.coefficients.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn filterbank_is_triangular_on_mel_scale() {
        let cfg = MfccConfig::default();
        let fb = mel_filterbank(&cfg);
        assert_eq!(fb.shape(), (26, 129));
        assert!(fb.iter().all(|&w| (0.0..=1.0).contains(&w)));
        for m in 0..26 {
            assert!(fb.row(m).iter().any(|&w| w > 0.0), "filter {m} is empty");
        }
        assert!((mel_to_hz(hz_to_mel(1234.5)) - 1234.5).abs() < 1e-9);
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn dct_is_orthonormal() {
        let n = 26;
        for a in 0..n {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            let col = dct2_orthonormal(&e);
            let norm: f64 = col.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_rate() {
        let mut seg = segment(vec![0.1; 4480]);
        seg.sample_rate = 44_100;
        assert!(mfcc(&seg, &MfccConfig::default()).is_err());
    }
}
