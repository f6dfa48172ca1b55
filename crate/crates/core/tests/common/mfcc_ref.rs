//! Brute-force MFCC reference built from direct DFT sums, explicit
//! filterbank loops and a textbook DCT, sharing no code with the library.

use std::f64::consts::PI;

use qad_core::audio::{mfcc, AudioSegment, MfccConfig};

pub const FS: f64 = 16_000.0;
const FRAME: usize = 256;
const HOP: usize = 128;
pub const FRAMES: usize = 35;
const FILTERS: usize = 26;

fn mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn inv_mel(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

pub fn filter_edges() -> Vec<f64> {
    let top = mel(FS / 2.0);
    (0..FILTERS + 2)
        .map(|i| inv_mel(top * i as f64 / (FILTERS + 1) as f64))
        .collect()
}

pub fn reference_mfcc(x: &[f64]) -> Vec<Vec<f64>> {
    let total = (FRAMES - 1) * HOP + FRAME;
    let mut y = vec![0.0; total];
    for n in 0..x.len().min(total) {
        y[n] = if n == 0 { x[0] } else { x[n] - 0.97 * x[n - 1] };
    }
    let edges = filter_edges();
    let mut columns = Vec::new();
    for t in 0..FRAMES {
        let mut power = vec![0.0; FRAME / 2 + 1];
        for (k, p) in power.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for n in 0..FRAME {
                let w = 0.54 - 0.46 * (2.0 * PI * n as f64 / (FRAME - 1) as f64).cos();
                let v = y[t * HOP + n] * w;
                let phase = -2.0 * PI * (k * n) as f64 / FRAME as f64;
                re += v * phase.cos();
                im += v * phase.sin();
            }
            *p = (re * re + im * im) / FRAME as f64;
        }
        let mut log_e = vec![0.0; FILTERS];
        for m in 0..FILTERS {
            let mut e = 0.0;
            for (k, p) in power.iter().enumerate() {
                let f = k as f64 * FS / FRAME as f64;
                let w = if f > edges[m] && f <= edges[m + 1] {
                    (f - edges[m]) / (edges[m + 1] - edges[m])
                } else if f > edges[m + 1] && f < edges[m + 2] {
                    (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1])
                } else {
                    0.0
                };
                e += w * p;
            }
            log_e[m] = e.max(1e-10).ln();
        }
        let col: Vec<f64> = (1..=12)
            .map(|k| {
                let s: f64 = (0..FILTERS)
                    .map(|m| log_e[m] * (PI * k as f64 * (m as f64 + 0.5) / FILTERS as f64).cos())
                    .sum();
                s * (2.0 / FILTERS as f64).sqrt()
            })
            .collect();
        columns.push(col);
    }
    columns
}

/// Largest absolute gap between the library MFCC and the reference.
pub fn max_deviation(x: &[f64]) -> f64 {
    let seg = AudioSegment {
        samples: x.to_vec(),
        sample_rate: 16_000,
        start_s: 0.0,
    };
    let got = mfcc(&seg, &MfccConfig::default()).unwrap();
    assert_eq!(got.shape(), (12, FRAMES));
    let want = reference_mfcc(x);
    let mut worst = 0.0f64;
    for t in 0..FRAMES {
        for c in 0..12 {
            worst = worst.max((got.coefficients[(c, t)] - want[t][c]).abs());
        }
    }
    worst
}

pub fn sinusoid(freq: f64, amp: f64) -> Vec<f64> {
    (0..4480)
        .map(|n| amp * (2.0 * PI * freq * n as f64 / FS).sin())
        .collect()
}
