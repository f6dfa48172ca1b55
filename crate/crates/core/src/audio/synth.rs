//! Deterministic synthetic recordings standing in for the instrument corpus.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;

use super::dataset::{write_manifest, Label, ManifestEntry, Split};
use super::wav::write_wav;
use crate::error::Result;
use crate::rng;

pub const SYNTH_RATE: u32 = 22_050;

/// A short recording with a random amount of leading silence followed by a
/// sound whose character depends on `label`.
pub fn synthetic_clip(label: Label, seed: u64, duration_s: f64) -> Vec<f64> {
    let mut r = rng::rng(seed);
    let fs = f64::from(SYNTH_RATE);
    let n = (duration_s * fs) as usize;
    let lead = (r.random_range(0.0..0.15) * fs) as usize;
    let mut out = vec![0.0; n];
    match label {
        Label::Violin | Label::SyntheticNormal => {
            let f0 = r.random_range(392.0..523.0);
            let vibrato = r.random_range(4.5..6.5);
            let phases: Vec<f64> = (0..8).map(|_| r.random_range(0.0..2.0 * PI)).collect();
            for (i, s) in out.iter_mut().enumerate().skip(lead) {
                let t = (i - lead) as f64 / fs;
                let f = f0 * (1.0 + 0.004 * (2.0 * PI * vibrato * t).sin());
                *s = (1..=8)
                    .map(|h| (2.0 * PI * f * h as f64 * t + phases[h - 1]).sin() / h as f64)
                    .sum::<f64>()
                    * 0.25;
            }
        }
        Label::Guitar => {
            let f0 = r.random_range(98.0..247.0);
            for (i, s) in out.iter_mut().enumerate().skip(lead) {
                let t = (i - lead) as f64 / fs;
                *s = (1..=10)
                    .map(|h| {
                        let h = h as f64;
                        (2.0 * PI * f0 * h * t).sin() * (-t * (2.0 + h)).exp() / h
                    })
                    .sum::<f64>()
                    * 0.4;
            }
        }
        Label::Crowd | Label::SyntheticAnomaly => {
            let mut smooth = 0.0;
            let rate = r.random_range(1.5..4.0);
            for (i, s) in out.iter_mut().enumerate().skip(lead) {
                let t = (i - lead) as f64 / fs;
                let white: f64 = r.sample(StandardNormal);
                smooth = 0.8 * smooth + 0.2 * white;
                *s = 0.3 * smooth * (0.6 + 0.4 * (2.0 * PI * rate * t).sin());
            }
        }
        Label::Glass => {
            let partials: Vec<f64> = (0..5).map(|_| r.random_range(2000.0..6000.0)).collect();
            for (i, s) in out.iter_mut().enumerate().skip(lead) {
                let t = (i - lead) as f64 / fs;
                *s = partials
                    .iter()
                    .map(|f| (2.0 * PI * f * t).sin())
                    .sum::<f64>()
                    * 0.12
                    * (-6.0 * t).exp();
            }
        }
    }
    for s in out.iter_mut().skip(lead) {
        *s += 0.002 * r.sample::<f64, _>(StandardNormal);
    }
    out
}

/// Writes one WAV per `(label, split)` pair plus a `manifest.csv` into `dir`
/// and returns the manifest path.
pub fn write_corpus(dir: &Path, items: &[(Label, Split)], seed: u64) -> Result<PathBuf> {
    let mut entries = Vec::with_capacity(items.len());
    for (i, &(label, split)) in items.iter().enumerate() {
        let name = format!("{}_{i:03}.wav", label.as_str());
        let path = dir.join(&name);
        write_wav(
            &path,
            &synthetic_clip(label, rng::item_seed(seed, i as u64), 0.6),
            SYNTH_RATE,
        )?;
        entries.push(ManifestEntry {
            source_id: name,
            path,
            label,
            split,
        });
    }
    let manifest = dir.join("manifest.csv");
    write_manifest(&manifest, &entries)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clips_are_deterministic_and_bounded() {
        for label in Label::ALL {
            let a = synthetic_clip(label, 9, 0.5);
            assert_eq!(a, synthetic_clip(label, 9, 0.5));
            assert!(a.iter().all(|s| s.abs() <= 1.0));
            assert!(a.iter().any(|s| s.abs() > 0.01));
        }
    }
}
